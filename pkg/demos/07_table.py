"""
Which curvature operators are realizable
========================================

For each combination of nonzero components (Weyl, symmetric Ricci,
antisymmetric Ricci) we try to realize a random operator with a connection
that keeps the same combination at every point.
"""

import json

from curvforge.cli import TABLE_ROWS, table_row

m, order = 3, 6
print(f"{'W':>3} {'rho_s':>6} {'rho_a':>6}   expected  result")
for n, (mask, expected) in enumerate(TABLE_ROWS):
    row = table_row(frozenset(mask), expected, [0, n], m, order)
    c = row["components"]
    print(f"{c['weyl']:>3} {c['sym']:>6} {c['alt']:>6}   {expected:<9} {row['result']}")
    if row["result"] == "obstructed":
        print(json.dumps([ch for ch in row["checks"] if ch["status"] == "witness"][0], indent=1))
