/** Tag markup helpers: highlighting as the author types, plus a quick local
 * validity check so obvious mistakes surface before a request is sent. The
 * server remains the authority and re-validates everything. */

export const KNOWN_TAGS = [
  "sub",
  "paraphrase",
  "para",
  "rephrase",
  "biography",
  "bio",
  "cause",
  "effect",
  "contrast",
  "concession",
  "comparison",
  "cntra",
  "description",
  "descp",
  "describe",
  "idiom",
  "mask",
] as const;

export const PALETTE: ReadonlyArray<{ label: string; token: string }> = [
  { label: "cause", token: "<cause>" },
  { label: "effect", token: "<effect>" },
  { label: "contrast", token: "<contrast>" },
  { label: "description", token: "<description>" },
  { label: "biography", token: "<biography>" },
  { label: "idiom", token: "<idiom>" },
  { label: "rephrase", token: "<sub>" },
  { label: "mask", token: "<mask>" },
];

const TAG_PATTERN = /<([A-Za-z][A-Za-z0-9_-]*)>/g;
const RESERVED = new Set(["sep", "answer"]);
const PAIRED = new Set(["sub", "paraphrase", "para", "rephrase"]);
const KNOWN = new Set<string>(KNOWN_TAGS);

export interface TagToken {
  start: number;
  end: number;
  name: string;
  known: boolean;
}

export function findTagTokens(text: string): TagToken[] {
  const tokens: TagToken[] = [];
  for (const match of text.matchAll(TAG_PATTERN)) {
    const name = match[1]!.toLowerCase();
    tokens.push({
      start: match.index!,
      end: match.index! + match[0].length,
      name,
      known: KNOWN.has(name),
    });
  }
  return tokens;
}

/** Returns a human-readable problem, or null when the markup looks sendable. */
export function validateMarkup(text: string): string | null {
  const tokens = findTagTokens(text);
  if (tokens.length === 0) {
    return "add at least one intent tag";
  }
  let openPair = false;
  let pairs = 0;
  for (const token of tokens) {
    if (RESERVED.has(token.name)) {
      return `<${token.name}> is reserved`;
    }
    if (!token.known) {
      return `unknown tag <${token.name}>`;
    }
    if (PAIRED.has(token.name)) {
      if (openPair) {
        openPair = false;
        pairs += 1;
        if (pairs > 1) return "only one rephrase region is allowed";
      } else {
        openPair = true;
      }
    } else if (openPair) {
      return "tags cannot appear inside a rephrase region";
    }
  }
  if (openPair) {
    return "rephrase delimiters must come in pairs";
  }
  return null;
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;");
}

/** HTML with tag tokens wrapped in <mark> elements (invalid ones flagged). */
export function renderHighlights(text: string): string {
  const tokens = findTagTokens(text);
  let cursor = 0;
  const parts: string[] = [];
  for (const token of tokens) {
    parts.push(escapeHtml(text.slice(cursor, token.start)));
    const cls = token.known ? "tag" : "tag tag-unknown";
    parts.push(`<mark class="${cls}">${escapeHtml(text.slice(token.start, token.end))}</mark>`);
    cursor = token.end;
  }
  parts.push(escapeHtml(text.slice(cursor)));
  return parts.join("");
}
