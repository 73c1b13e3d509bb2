"""Universal POS tagging aligned to scorer tokens.

A deterministic lexicon-and-suffix tagger produces one Universal POS tag
per *word*; tags are then projected onto the scorer's (possibly subword or
character) tokens by character offsets with a majority-overlap rule.  A
token overlapping no word gets the catch-all tag "X"; the projection never
raises.
"""

from __future__ import annotations

import json
import re

_WORD_RE = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)?|\d+(?:\.\d+)?|[^\sA-Za-z\d]")

_CLOSED = {
    "DET": {"the", "a", "an", "this", "that", "these", "those", "each",
            "every", "some", "any", "all", "both", "no", "another"},
    "PRON": {"i", "you", "he", "she", "it", "we", "they", "me", "him", "her",
             "us", "them", "my", "your", "his", "its", "our", "their",
             "mine", "yours", "hers", "ours", "theirs", "who", "whom",
             "whose", "which", "what", "something", "nothing", "anything",
             "everything", "someone", "anyone", "everyone", "itself",
             "himself", "herself", "themselves", "myself", "yourself"},
    "ADP": {"of", "in", "on", "at", "by", "for", "with", "about", "against",
            "between", "into", "through", "during", "before", "after",
            "above", "below", "from", "up", "down", "out", "off", "over",
            "under", "near", "without", "within", "along", "across",
            "behind", "beyond", "around", "among", "upon", "toward",
            "towards", "onto", "per"},
    "CCONJ": {"and", "or", "but", "nor", "yet", "so", "plus"},
    "SCONJ": {"because", "although", "though", "if", "while", "whereas",
              "unless", "since", "until", "when", "whenever", "where",
              "wherever", "that", "whether", "as"},
    "AUX": {"is", "am", "are", "was", "were", "be", "been", "being", "do",
            "does", "did", "have", "has", "had", "having", "will", "would",
            "shall", "should", "can", "could", "may", "might", "must",
            "ought"},
    "PART": {"to", "not", "n't"},
    "ADV": {"very", "also", "now", "then", "here", "there", "how", "why",
            "too", "just", "only", "even", "still", "again", "already",
            "often", "always", "never", "sometimes", "soon", "rather",
            "quite", "almost", "perhaps", "maybe", "however", "instead",
            "together", "away", "back", "more", "most", "less", "least",
            "well", "far", "once", "twice"},
    "INTJ": {"yes", "no", "oh", "ah", "hello", "hi", "hey", "ok", "okay",
             "please", "thanks", "wow", "hmm"},
}

_VERBS = {
    "run", "ran", "go", "goes", "went", "gone", "make", "made", "take",
    "took", "taken", "get", "got", "gotten", "see", "saw", "seen", "say",
    "said", "sit", "sat", "stand", "stood", "come", "came", "know", "knew",
    "known", "think", "thought", "find", "found", "give", "gave", "given",
    "tell", "told", "become", "became", "show", "showed", "shown", "leave",
    "left", "feel", "felt", "put", "bring", "brought", "begin", "began",
    "begun", "keep", "kept", "hold", "held", "write", "wrote", "written",
    "read", "eat", "ate", "eaten", "sleep", "slept", "speak", "spoke",
    "spoken", "spend", "spent", "grow", "grew", "grown", "win", "won",
    "buy", "bought", "send", "sent", "build", "built", "fall", "fell",
    "fallen", "mean", "meant", "let", "set", "hear", "heard", "meet",
    "met", "pay", "paid", "lose", "lost", "learn", "learned", "teach",
    "taught", "catch", "caught", "draw", "drew", "drawn", "choose", "chose",
    "chosen", "drive", "drove", "driven", "walk", "talk", "look", "want",
    "use", "work", "call", "try", "tried", "ask", "need", "seem", "seemed",
    "help", "play", "move", "live", "believe", "happen", "detect", "score",
    "measure", "compare", "predict", "train", "test", "mask", "answer",
    "contain", "start", "stop", "turn", "follow", "change", "remove",
    "remain", "appear", "carry", "differ", "vary", "depend", "holds",
    "works", "runs", "sits", "tells",
}

_ADJECTIVES = {
    "big", "small", "large", "little", "good", "bad", "high", "low", "old",
    "new", "young", "long", "short", "great", "own", "other", "same",
    "right", "wrong", "different", "important", "public", "able", "human",
    "real", "sure", "clear", "likely", "recent", "certain", "common",
    "early", "late", "easy", "hard", "strong", "weak", "true", "false",
    "full", "empty", "free", "open", "closed", "fast", "slow", "deep",
    "shallow", "warm", "cold", "hot", "cool", "fine", "main", "whole",
    "simple", "complex", "plausible", "professional", "fixed", "uneven",
    "personal", "unusual", "familiar",
}

_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ance", "ence",
                  "ship", "hood", "ism", "ist", "ogy", "graph")
_ADJ_SUFFIXES = ("ous", "ful", "less", "able", "ible", "ive", "ish", "ic",
                 "ical", "al", "ary", "like")


def tag_word(word: str, sentence_initial: bool = False) -> str:
    """Universal POS tag for one word token."""
    if not word:
        return "X"
    if not any(c.isalnum() for c in word):
        return "PUNCT"
    if word[0].isdigit():
        return "NUM"
    lower = word.lower()
    for tag, lexicon in _CLOSED.items():
        if lower in lexicon:
            return tag
    if lower in _VERBS:
        return "VERB"
    if lower in _ADJECTIVES:
        return "ADJ"
    if lower.endswith(("s", "es")) and len(lower) > 3:
        stem = lower[:-2] if lower.endswith("es") else lower[:-1]
        if stem in _VERBS:
            return "VERB"
        if stem in _ADJECTIVES:
            return "ADJ"
    if lower.endswith("ly") and len(lower) > 4:
        return "ADV"
    if lower.endswith(("ing", "ed")) and len(lower) > 4:
        return "VERB"
    if lower.endswith(_NOUN_SUFFIXES):
        return "NOUN"
    if lower.endswith(_ADJ_SUFFIXES) and len(lower) > 4:
        return "ADJ"
    if word[0].isupper() and not sentence_initial:
        return "PROPN"
    return "NOUN"


def tag_text(text: str) -> list[tuple[int, int, str]]:
    """Word spans with tags: (start, end, tag), in document order."""
    spans = []
    sentence_initial = True
    for match in _WORD_RE.finditer(text):
        word = match.group(0)
        tag = tag_word(word, sentence_initial=sentence_initial)
        spans.append((match.start(), match.end(), tag))
        sentence_initial = tag == "PUNCT" and word in {".", "!", "?"}
    return spans


def align_tags(word_spans, token_offsets) -> list[str]:
    """Project word tags onto token offsets by majority character overlap.

    Each token takes the tag of the word it overlaps most (ties to the
    earlier word); tokens overlapping no word get "X".
    """
    tags = []
    for a, b in token_offsets:
        best_tag, best_overlap = "X", 0
        for start, end, tag in word_spans:
            if start >= b:
                break
            overlap = min(b, end) - max(a, start)
            if overlap > best_overlap:
                best_tag, best_overlap = tag, overlap
        tags.append(best_tag)
    return tags


def tag_scores_file(in_path, out_path) -> int:
    """Fill ``annotations`` in a score file produced by ``score-lm``.

    The document text is reconstructed by concatenating the token strings
    (lossless for character and byte-level BPE tokenizations), tagged at the
    word level, and projected back onto the tokens.  Returns the document
    count.
    """
    count = 0
    with open(in_path, "r", encoding="utf-8") as src, \
            open(out_path, "w", encoding="utf-8") as dst:
        for line in src:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            tokens = record["tokens"]
            offsets = []
            cursor = 0
            for token in tokens:
                offsets.append((cursor, cursor + len(token)))
                cursor += len(token)
            text = "".join(tokens)
            record["annotations"] = align_tags(tag_text(text), offsets)
            dst.write(json.dumps(record, ensure_ascii=False))
            dst.write("\n")
            count += 1
    return count
