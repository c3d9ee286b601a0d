#!/usr/bin/env python3
"""Smoke test for the msls5py extension module.

Build and place the module first:
    cargo build -p msls5-py --release
    cp target/release/libmsls5py.so python/msls5py.so
then run:  python3 python/smoke_test.py
"""

import sys

import msls5py


def main() -> int:
    f = msls5py.Field(2, 1)
    assert f.q == 2 and f.big_size == 32 and f.sigma_size == 31
    assert f.descriptor()["defining_poly"] == [1, 0, 1, 0, 0, 1]

    # arithmetic in generator-power notation
    assert f.mul("g^3", "g^4") == "g^7"
    assert f.add("g^0", "g^0") == "0"
    assert f.frobenius("g^1", 1) == "g^2"
    assert f.norm("g^17") == "g^0"

    # pseudoregulus is scattered with 31 points; g_b never is
    res = f.scattered_check("x^q")
    assert res["scattered"] and res["size"] == 31
    res = f.scattered_check("x^q2 + g^5*x^q4")
    assert not res["scattered"] and len(res["witness"]) == 2

    # the q=2 census: 32^3 planes, no new candidates
    c = f.scan("census", reduce=False)
    assert c["complete"] and c["counterexamples"] == 0
    assert c["units"] == 32768
    assert "new_candidate" not in c["census"]

    f3 = msls5py.Field.from_q("3")
    # an LP plane and its classification data
    rep = f3.classify_triple("0", "0", "g^1")
    assert rep["class"] in ("lp_config_i", "lp_config_ii")
    assert rep["rk_a"] >= 4 and rep["rk_b"] >= 4

    # LP family members are scattered of maximum size
    fam = f3.family("lp", ["g^1"], s=1)
    assert fam["scattered"] and fam["size"] == 121 and fam["rank"] == 5

    # the C4 candidate family is never scattered; find a norm-one k first
    k = None
    for j in range(242):
        cand = f"g^{j}"
        if f3.norm(cand) == "g^0":
            k = cand
            break
    assert k is not None
    fam = f3.family("c4", [k])
    assert not fam["scattered"]

    # witness table entry for q=3, (delta, eps) = (1, 2), s = 1
    x = f3.sctness_witness("1", "2", 1)
    assert x is not None

    # curve of (1,2) has rational points; the conic branch needs a root of
    # x^2+3x+1, absent at q=3, present at q=4
    assert f3.curve_count("1", "2", 1) >= 1
    assert f3.conic_witness(1) is None
    f4 = msls5py.Field(2, 2)
    w = f4.conic_witness(1)
    assert w is not None

    print("msls5py smoke test OK")
    return 0


if __name__ == "__main__":
    sys.exit(main())
