"""Recompute the ternary worked-example tables and print every cell with its verdict."""

from nashcode import Codebook, check_nash, tie_structure
from nashcode.instances import TERNARY_ROWS, reproduce_tables, ternary_game


def main():
    game = ternary_game()
    print(f"{'code':<6}{'Y0':<8}{'Y1':<8}{'p0':>7}{'p1':>7}{'U':>8}{'V':>8}  Nash")
    for row in TERNARY_ROWS:
        code = Codebook(tuple(row.split(",")))
        report = check_nash(game, code)
        regions = ["{" + ",".join(y[0] for y in r) + "}" for r in tie_structure(game, code).regions()]
        p0, p1 = (float(p) for p in report.per_state)
        print(
            f"{row:<6}{regions[0]:<8}{regions[1]:<8}{p0:>7.2f}{p1:>7.2f}"
            f"{float(report.sender_payoff):>8.2f}{float(report.receiver_payoff):>8.2f}  {report.is_nash}"
        )
    report = reproduce_tables()
    print(f"\n{report.cells} cells compared exactly, {len(report.diffs)} mismatches")
    for d in report.diffs:
        print(f"  {d['cell']}: expected {d['expected']}, got {d['got']}")
    return 0 if report.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
