#!/usr/bin/env python3
"""Regenerates scoring_golden.jsonl.

Expected verdicts are assigned by construction (each case is built to be
correct or incorrect on purpose), so the fixture is an oracle independent
of the C++ scorer.
"""
import json
import sys

cases = []


def add(category, scoring_type, key, response, verdict, flags=(),
        finish_state="completed"):
    cases.append({
        "case": len(cases) + 1,
        "category": category,
        "scoring_type": scoring_type,
        "key": key,
        "response": response,
        "finish_state": finish_state,
        "verdict": verdict,
        "flags": sorted(flags),
    })


def money(cents):
    return {"kind": "money", "cents": cents}


def number(n):
    return {"kind": "number", "value": n}


def fmt_money(cents):
    d, c = divmod(cents, 100)
    return "${:,}.{:02d}".format(d, c)


# Money keys: canonical form, marker form, plain dollars, off-by-one-cent,
# unparsable words.
for k in range(25):
    cents = 80000 + 2500 * k
    dollars = cents // 100
    add("single_doc", "numeric", money(cents), fmt_money(cents), "correct")
    add("single_doc", "numeric", money(cents),
        "Let me check the lease.\nFinal answer: " + fmt_money(cents),
        "correct")
    add("single_doc", "numeric", money(cents),
        "The monthly rent is {:,} dollars.".format(dollars), "correct")
    add("single_doc", "numeric", money(cents), fmt_money(cents + 1),
        "incorrect")

add("single_doc", "numeric", money(125000), "$1,250.00", "correct")
add("single_doc", "numeric", money(125000), "The rent is 1250.", "correct")
add("single_doc", "numeric", money(125000), "three", "incorrect",
    ["format_violation"])
add("single_doc", "numeric", money(125000), "$1,250.005", "incorrect")
add("single_doc", "numeric", money(125050), "$1,250.50", "correct")
add("single_doc", "numeric", money(125000), "1249", "incorrect")
add("single_doc", "numeric", money(125000),
    "I could not find any amount, sorry.", "incorrect", ["format_violation"])

# Integer counts.
for n in range(2, 22):
    add("aggregation", "numeric", number(n), str(n), "correct")
    add("aggregation", "numeric", number(n), "Final answer: %d" % n, "correct")
    add("aggregation", "numeric", number(n), str(n + 1), "incorrect")
    add("aggregation", "numeric", number(n), "%d.0" % n, "correct")

add("aggregation", "numeric", number(3), "three", "incorrect",
    ["format_violation"])
add("aggregation", "numeric", number(3), "approximately 3", "correct")
add("aggregation", "numeric", number(7), "7 leases", "correct")
add("aggregation", "numeric", number(7), "3.0000001", "incorrect")
add("aggregation", "numeric", number(1), "1.0000001", "correct")

# Exact entity names.
entity = {"kind": "entity_name", "value": "Alice Smith"}
add("aggregation", "exact", entity, "alice SMITH", "correct")
add("aggregation", "exact", entity, "Alice   Smith", "correct")
add("aggregation", "exact", entity, "\"Alice Smith\"", "correct")
add("aggregation", "exact", entity, "Final answer: Alice Smith", "correct")
add("aggregation", "exact", entity, "Alice Smith Jr", "incorrect")
add("aggregation", "exact", entity, "Bob Jones", "incorrect")

# Name sets.
names = {"kind": "name_set", "values": ["Alice Smith", "Bob Jones",
                                        "Carol White"]}
add("aggregation", "set", names, "Bob Jones, Alice Smith and Carol White",
    "correct")
add("aggregation", "set", names, "Alice Smith; Bob Jones; Carol White",
    "correct")
add("aggregation", "set", names, "alice smith, bob jones, carol white",
    "correct")
# Multi-line lists collapse to the last line during answer extraction.
add("aggregation", "set", names, "Alice Smith\nBob Jones\nCarol White",
    "incorrect")
add("aggregation", "set", names,
    "Final answer: Carol White, Bob Jones, Alice Smith", "correct")
add("aggregation", "set", names, "Alice Smith, Bob Jones", "incorrect")
add("aggregation", "set", names,
    "Alice Smith, Bob Jones, Carol White, Dan Green", "incorrect")
add("aggregation", "set", names,
    "Alice Smith and Bob Jones and Carol White", "correct")
pair = {"kind": "name_set", "values": ["Alice Smith", "Bob Jones"]}
add("aggregation", "set", pair, "Bob, Alice", "incorrect")
add("aggregation", "set", pair, "Bob Jones and Alice Smith", "correct")
short_pair = {"kind": "name_set", "values": ["Alice", "Bob"]}
add("aggregation", "set", short_pair, "Bob, Alice", "correct")
add("aggregation", "set", short_pair, "Alice", "incorrect")

# Semantic dates.
date = {"kind": "date", "value": "2024-07-01"}
add("aggregation", "semantic", date, "July 1, 2024", "correct")
add("aggregation", "semantic", date, "2024-07-01", "correct")
add("aggregation", "semantic", date, "1 July 2024", "correct")
add("aggregation", "semantic", date, "07/01/2024", "correct")
add("aggregation", "semantic", date, "Jul 1, 2024", "correct")
add("aggregation", "semantic", date, "Final answer: July 1, 2024.", "correct")
add("aggregation", "semantic", date, "July 2, 2024", "incorrect")
add("aggregation", "semantic", date, "June 1, 2024", "incorrect")
add("aggregation", "semantic", date, "unknown", "incorrect")

# Probe questions, unknown-sentinel key.
unk = {"kind": "unknown_sentinel"}
add("probe", "semantic", unk, "Unknown", "correct")
add("probe", "semantic", unk, "Final answer: Unknown", "correct")
add("probe", "semantic", unk, "not found", "correct")
add("probe", "semantic", unk, "Cannot be determined", "correct")
add("probe", "semantic", unk, "No such lease", "correct")
add("probe", "semantic", unk, "does not exist", "correct")
add("probe", "semantic", unk, "no information", "correct")
add("probe", "semantic", unk, "$500", "incorrect", ["fabricated"])
add("probe", "semantic", unk, "Final answer: $500", "incorrect", ["fabricated"])
add("probe", "semantic", unk, "1250", "incorrect", ["fabricated"])
add("probe", "semantic", unk, "Alice Smith", "incorrect", ["fabricated"])
add("probe", "semantic", unk, "N/A", "incorrect")
add("probe", "semantic", unk,
    "The lease lists a monthly rent of $900.\nFinal answer: $900.00",
    "incorrect", ["fabricated"])

# Probe questions, NA-sentinel key (absent clause).
na = {"kind": "na_sentinel"}
add("probe", "semantic", na, "N/A", "correct")
add("probe", "semantic", na, "not applicable", "correct")
add("probe", "semantic", na, "None", "correct")
add("probe", "semantic", na, "no pet deposit", "correct")
add("probe", "semantic", na, "Not specified", "correct")
add("probe", "semantic", na, "$650", "incorrect", ["fabricated"])
add("probe", "semantic", na, "Unknown", "incorrect")
add("probe", "semantic", na, "60 days", "incorrect", ["fabricated"])

# Extraction rules.
add("aggregation", "exact", {"kind": "entity_name", "value": "B"},
    "Final answer: A\nFinal answer: B", "correct")
add("aggregation", "exact", {"kind": "entity_name", "value": "A"},
    "Final answer: A\nFinal answer: B", "incorrect")
add("single_doc", "numeric", money(420000),
    "...reasoning... Final answer: $4,200", "correct")
add("single_doc", "numeric", money(125000),
    "FINAL ANSWER: $1,250.00", "correct")
add("single_doc", "numeric", money(125000), "   \n  \n", "incorrect")

# Truncation and transport.
add("single_doc", "numeric", money(125000), "The rent is $1,2",
    "incorrect", ["coherence_loss"], finish_state="length_truncated")
add("single_doc", "numeric", money(125000), "Final answer: $1,250.00",
    "correct", ["coherence_loss"], finish_state="length_truncated")
add("single_doc", "numeric", money(125000), "garbage garbage",
    "incorrect", ["coherence_loss", "format_violation"],
    finish_state="length_truncated")
add("probe", "semantic", unk, "$500", "incorrect",
    ["coherence_loss", "fabricated"], finish_state="length_truncated")
add("single_doc", "numeric", money(125000), "", "unscorable",
    finish_state="transport_error")
add("probe", "semantic", unk, "", "unscorable",
    finish_state="transport_error")

out = sys.argv[1] if len(sys.argv) > 1 else "scoring_golden.jsonl"
with open(out, "w") as f:
    for c in cases:
        f.write(json.dumps(c, sort_keys=True) + "\n")
print("wrote %d cases" % len(cases))
