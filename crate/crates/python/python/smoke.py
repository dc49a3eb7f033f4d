"""Smoke test for the nnrank extension module."""

import json
import math
import os
import tempfile

import nnrank


def main():
    a = nnrank.cohen_rothblum()
    assert nnrank.numerical_rank(a) == 3

    res = nnrank.nu_plus(a)
    assert res["status"] == "optimal", res
    assert abs(res["value"] - 4 * math.sqrt(2)) < 1e-4
    assert abs(res["ratio"] - 4.0) < 1e-3
    assert res["certified_value"] <= res["value"] + 1e-7

    report = nnrank.bound_report(nnrank.perturbed_cohen_rothblum(0.1))
    assert report["best_integer_bound"] == 4
    assert report["bounds"]["rectangle_cover"] == 1
    assert list(report)[:4] == ["m", "n", "frobenius", "nuclear"]

    cover = nnrank.rectangle_cover(nnrank.boolean_rank_example())
    assert sorted(cover) == [([0, 1], [1, 2, 3]), ([1, 2, 3], [0, 1])]

    slack, cert = nnrank.hypercube_slack(3)
    check = cert.verify(slack)
    assert check["psd_min_eigenvalue"] >= -1e-9
    assert abs(check["objective"] - 12.0) < 1e-9
    again = nnrank.Certificate.from_json(cert.to_json())
    assert again.shape == (6, 8)
    assert abs(again.certified_value(slack) - 12.0) < 1e-6

    try:
        nnrank.nu_plus([[1.0, -1.0]])
    except ValueError:
        pass
    else:
        raise AssertionError("negative entries must be rejected")

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "square.dat-s")
        nnrank.export_sdpa(a, path)
        assert os.path.getsize(path) > 0

    print(json.dumps({"nu_plus_0": res["value"], "best_integer_bound": report["best_integer_bound"]}))
    print("smoke test passed")


if __name__ == "__main__":
    main()
