#!/usr/bin/env python3
"""Regenerates core/src/unicode_tables.inc from Python's unicodedata.

The toolkit only needs three character classes beyond what fits in a few
hardcoded ranges: punctuation/symbols (general categories P* and S*),
space separators (Zs), and Arabic-script letters.  Emitting them as sorted
codepoint ranges keeps the C++ side to a binary search over PODs.

Usage: python3 scripts/gen_unicode_tables.py > core/src/unicode_tables.inc
"""

import sys
import unicodedata

MAX_CP = 0x110000

ARABIC_BLOCKS = [(0x0600, 0x06FF), (0x0750, 0x077F), (0x08A0, 0x08FF),
                 (0xFB50, 0xFDFF), (0xFE70, 0xFEFF)]


def in_arabic_block(cp):
    return any(lo <= cp <= hi for lo, hi in ARABIC_BLOCKS)


def ranges(pred):
    out = []
    start = None
    for cp in range(MAX_CP):
        if 0xD800 <= cp <= 0xDFFF:
            ok = False
        else:
            ok = pred(cp, unicodedata.category(chr(cp)))
        if ok and start is None:
            start = cp
        elif not ok and start is not None:
            out.append((start, cp - 1))
            start = None
    if start is not None:
        out.append((start, MAX_CP - 1))
    return out


def emit(name, rs):
    print(f"inline constexpr CpRange {name}[] = {{")
    for i in range(0, len(rs), 4):
        row = ", ".join(f"{{0x{lo:05X}, 0x{hi:05X}}}" for lo, hi in rs[i:i + 4])
        print(f"    {row},")
    print("};")
    print()


def main():
    print("// Generated by scripts/gen_unicode_tables.py "
          f"(unicodedata {unicodedata.unidata_version}). Do not edit by hand.")
    print()
    emit("kPunctSymbolRanges", ranges(lambda cp, cat: cat[0] in "PS"))
    emit("kSpaceSeparatorRanges", ranges(lambda cp, cat: cat == "Zs"))
    emit("kArabicLetterRanges",
         ranges(lambda cp, cat: cat[0] == "L" and in_arabic_block(cp)))


if __name__ == "__main__":
    sys.exit(main())
