#!/usr/bin/env python3
"""Regenerate crates/core/data/romanization.tsv from the uroman resource tables.

Usage: python3 tools/gen_romanization_table.py > crates/core/data/romanization.tsv

Requires `pip install uroman`. The output is the per-codepoint table the Rust
romanizer loads; context rules (inherent vowel, virama, nukta pairs) live in
the Rust code.
"""
import re
import sys
import unicodedata as ud

import uroman

BLOCKS = [
    ("Devanagari", 0x0900, 0x097F),
    ("Bengali", 0x0980, 0x09FF),
    ("Gujarati", 0x0A80, 0x0AFF),
    ("Oriya", 0x0B00, 0x0B7F),
    ("Tamil", 0x0B80, 0x0BFF),
    ("Telugu", 0x0C00, 0x0C7F),
    ("Kannada", 0x0C80, 0x0CFF),
    ("Malayalam", 0x0D00, 0x0D7F),
]


def in_blocks(c):
    return any(lo <= ord(c) <= hi for _, lo, hi in BLOCKS)


def top_rule(u, s):
    best = None
    for r in u.rom_rules[s]:
        if r["t"] is None:
            continue
        n = r["n-restr"] or 0
        if best is None or n > best[0]:
            best = (n, r["t"])
    return None if best is None else best[1]


def classify(u, c, rom):
    cat = ud.category(c)
    name = ud.name(c, "")
    if u.dict_bool[("is-virama", c)]:
        return "virama"
    if u.dict_bool[("is-vowel-sign", c)]:
        return "vowel_dep"
    if cat == "Nd":
        return "digit"
    if cat.startswith("L") and "LETTER" in name:
        if re.fullmatch(r"[bcdfghjklmnpqrstvwxyz]+a?", rom or "") or re.fullmatch(r"[cfghkmnqrstxy]?ya+", rom or ""):
            if "VOCALIC" not in name:
                return "consonant"
        return "vowel_ind"
    return "sign"


def flags(u, c):
    out = []
    cat = ud.category(c)
    name = ud.name(c, "")
    if cat == "Mn":
        out.append("mn")
    if cat.startswith("L"):
        out.append("alpha")
    if "NUKTA" in name:
        out.append("nukta")
    if "VOCALIC" in name:
        out.append("vocalic")
    if not u.chr_script_name(c):
        out.append("common")
    return ",".join(out) or "-"


def main():
    u = uroman.Uroman()
    w = sys.stdout.write
    w("# romanization table v1\n")
    w("# codepoint(s)\tlatin\tclass\tflags\n")
    w("# flags: mn=nonspacing mark, alpha=letter, nukta, vocalic, common=not script-specific\n")
    w("# '+' prefix on latin marks a tail sign that never takes the inherent vowel\n")
    for script, lo, hi in BLOCKS:
        w(f"# {script}\n")
        for cp in range(lo, hi + 1):
            c = chr(cp)
            if not ud.name(c, ""):
                continue
            rom = top_rule(u, c)
            if rom is None and ud.numeric(c, None) is not None:
                v = ud.numeric(c)
                rom = str(int(v)) if v == int(v) else ""
            if rom is None:
                # uroman drops unmapped nonspacing/format marks; everything else
                # in the covered blocks is dropped too so no block codepoint survives.
                rom = ""
            w(f"U+{cp:04X}\t{rom}\t{classify(u, c, rom)}\t{flags(u, c)}\n")
    w("# sequences\n")
    seqs = sorted(k for k in list(u.rom_rules.keys()) if len(k) > 1 and all(in_blocks(c) for c in k))
    for s in seqs:
        rom = top_rule(u, s)
        if rom is None:
            continue
        cps = " ".join(f"U+{ord(c):04X}" for c in s)
        w(f"{cps}\t{rom}\tconsonant\t-\n")


if __name__ == "__main__":
    main()
