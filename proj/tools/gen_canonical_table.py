#!/usr/bin/env python3
"""Regenerates src/canonical_table.inc, the code point -> a..z letter table
used by terms::canonicalize.

A code point maps to the letters obtained by compatibility decomposition
(NFKD), dropping combining marks and case folding, provided the result is
non-empty and purely a..z. Letterforms NFKD leaves alone (o with stroke,
thorn, Greek and Cyrillic lookalikes, ...) come from MANUAL. Combining marks
map to the empty string so that decomposed input loses its diacritics.
"""
import sys
import unicodedata

RANGES = [
    (0x00A0, 0x024F),   # Latin-1 supplement, Latin extended A/B
    (0x0250, 0x02AF),   # IPA extensions
    (0x1D00, 0x1DBF),   # phonetic extensions
    (0x1E00, 0x1EFF),   # Latin extended additional
    (0x2070, 0x209F),   # super/subscripts
    (0x2100, 0x214F),   # letterlike symbols
    (0x2460, 0x24FF),   # enclosed alphanumerics
    (0x2C60, 0x2C7F),   # Latin extended C
    (0xA720, 0xA7FF),   # Latin extended D
    (0xFB00, 0xFB06),   # Latin ligatures
    (0xFF00, 0xFFEF),   # fullwidth forms
    (0x1D400, 0x1D7FF), # mathematical alphanumerics
    (0x1F130, 0x1F189), # enclosed alphanumeric supplement
]

COMBINING = [(0x0300, 0x036F), (0x1AB0, 0x1AFF), (0x1DC0, 0x1DFF), (0x20D0, 0x20FF), (0xFE20, 0xFE2F)]

MANUAL = {
    "ø": "o", "Ø": "o", "ł": "l", "Ł": "l", "đ": "d", "Đ": "d", "ħ": "h", "Ħ": "h",
    "ß": "ss", "ẞ": "ss", "æ": "ae", "Æ": "ae", "œ": "oe", "Œ": "oe", "þ": "th", "Þ": "th",
    "ð": "d", "Ð": "d", "ı": "i", "ŧ": "t", "Ŧ": "t", "ƀ": "b", "ɓ": "b", "ƈ": "c", "ɗ": "d",
    "ƒ": "f", "ɠ": "g", "ɨ": "i", "ƙ": "k", "ƚ": "l", "ɲ": "n", "ƞ": "n", "ɵ": "o", "ƥ": "p",
    "ʠ": "q", "ƫ": "t", "ƭ": "t", "ʈ": "t", "ʋ": "v", "ƴ": "y", "ƶ": "z", "ȥ": "z", "ĸ": "k",
    # Greek letters, by visual or phonetic counterpart.
    "α": "a", "β": "b", "γ": "g", "δ": "d", "ε": "e", "ζ": "z", "η": "n", "θ": "o", "ι": "i",
    "κ": "k", "λ": "l", "μ": "m", "ν": "v", "ξ": "x", "ο": "o", "π": "p", "ρ": "p", "σ": "s",
    "ς": "s", "τ": "t", "υ": "u", "φ": "f", "χ": "x", "ψ": "y", "ω": "w",
    "Α": "a", "Β": "b", "Γ": "g", "Δ": "d", "Ε": "e", "Ζ": "z", "Η": "h", "Θ": "o", "Ι": "i",
    "Κ": "k", "Λ": "l", "Μ": "m", "Ν": "n", "Ξ": "x", "Ο": "o", "Π": "p", "Ρ": "p", "Σ": "s",
    "Τ": "t", "Υ": "y", "Φ": "f", "Χ": "x", "Ψ": "y", "Ω": "w", "ϐ": "b",
    # Cyrillic homoglyphs.
    "а": "a", "в": "b", "е": "e", "ё": "e", "ѐ": "e", "к": "k", "м": "m", "н": "h", "о": "o",
    "р": "p", "с": "c", "т": "t", "у": "y", "х": "x", "ѕ": "s", "і": "i", "ї": "i", "ј": "j",
    "ԁ": "d", "һ": "h", "ԛ": "q", "ԝ": "w", "ь": "b",
    "А": "a", "В": "b", "Е": "e", "Ё": "e", "Ѐ": "e", "К": "k", "М": "m", "Н": "h", "О": "o",
    "Р": "p", "С": "c", "Т": "t", "У": "y", "Х": "x", "Ѕ": "s", "І": "i", "Ї": "i", "Ј": "j",
}


def mapping(ch):
    if ch in MANUAL:
        return MANUAL[ch]
    decomposed = unicodedata.normalize("NFKD", ch)
    stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
    folded = "".join(MANUAL.get(c, c) for c in stripped).casefold()
    if folded and all("a" <= c <= "z" for c in folded):
        return folded
    return None


def main(out_path):
    table = {}
    for lo, hi in COMBINING:
        for cp in range(lo, hi + 1):
            if unicodedata.combining(chr(cp)):
                table[cp] = ""
    for lo, hi in RANGES:
        for cp in range(lo, hi + 1):
            m = mapping(chr(cp))
            if m is not None:
                table[cp] = m
    for ch, m in MANUAL.items():
        table[ord(ch)] = m
    with open(out_path, "w", encoding="ascii") as out:
        out.write("// Generated by tools/gen_canonical_table.py; do not edit.\n")
        out.write(f"// Unicode data version {unicodedata.unidata_version}.\n")
        for cp in sorted(table):
            out.write(f'{{0x{cp:05X}, "{table[cp]}"}},\n')


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/canonical_table.inc")
