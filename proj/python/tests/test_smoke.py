"""Smoke tests for the python extension; kept dependency-free so they run
straight from ctest."""

import sys

import oligoscope as og


def check(condition, message):
    if not condition:
        print(f"FAIL  {message}")
        sys.exit(1)
    print(f"PASS  {message}")


def main():
    check(og.count_orbits("pure-set", 3) == 5, "point 3-types")
    check(og.count_orbits("dense-linear-order", 3) == 13, "order 3-types")
    check(og.pair_type_count("pure-set", 2) == 7, "pair types at window 2")
    check(og.pair_type_count("pure-set", 3) == 34, "pair types at window 3")

    ages = og.enumerate_age("random-graph", 3)
    check(len(ages) == 8, "graph age up to size 3")

    p = {"kind": "pure-set", "window": 3, "pairs": [[0, 1]]}
    q = {"kind": "pure-set", "window": 3, "pairs": [[1, 2]]}
    check(og.compose(p, q)["pairs"] == [[0, 2]], "relational composition")
    check(og.involution(p)["pairs"] == [[1, 0]], "involution transposes")
    check(og.is_idempotent({"kind": "pure-set", "window": 3, "pairs": [[0, 0], [2, 2]]}),
          "partial identities are idempotent")

    closure = og.star_closure([{"kind": "pure-set", "window": 3, "pairs": [[0, 1], [1, 2]]}])
    check(len(closure["elements"]) == 14, "closure of the shift")

    check(og.green_leq({"kind": "pure-set", "window": 2, "pairs": [[0, 0]]},
                       {"kind": "pure-set", "window": 2, "pairs": [[0, 1], [1, 0]]}),
          "green preorder")

    cents = og.central_idempotents({"kind": "pure-set", "size": 4, "payload": {}})
    check(len(cents) == 2, "window central idempotents")

    check(og.roelcke_distance([0, 1, 2], [1, 0, 2]) == "2/3", "lower-uniformity distance")

    verdict = og.classify_stability("random-graph", "E(x0,y0)")
    check(verdict["status"] == "Unstable", "edge relation unstable")
    verdict = og.classify_stability("random-graph", "x0 = y0")
    check(verdict["status"] == "Stable" and verdict["reduct"]["text"] == "x0 = y0",
          "equality stable with itself as reduct")

    witness = og.find_order_witness("dense-linear-order", "x0 < y0", length=4)
    check(witness["found"], "half-graph for the order relation")

    identity = og.coupling_identity(4)
    composed = og.coupling_compose(identity, identity)
    check(composed == identity, "identity coupling is idempotent")
    check(len(og.coupling_partition_idempotents(3)) == 5, "Bell(3) partition idempotents")
    check(len(og.coupling_central_idempotents(4)) == 2, "coupling central idempotents")

    check(abs(og.operator_norm({"n": 2, "entries": [[0, 2], [0, 0]]}) - 2.0) < 1e-9,
          "operator norm of the shear")
    check(og.check_projection({"n": 2, "entries": [[1, 0], [0, 0]]}), "diagonal projection")

    try:
        og.count_orbits("no-such-kind", 1)
        check(False, "bad kind raises")
    except og.DomainError:
        check(True, "bad kind raises")

    print("smoke tests passed")


if __name__ == "__main__":
    main()
