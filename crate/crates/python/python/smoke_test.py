"""Smoke test for the pybandsel extension module.

Build and install first, e.g. `pip install --no-build-isolation -e crates/python`.
"""

import math
import tempfile
from pathlib import Path

import pybandsel as bs


def main():
    assert bs.entropy([0, 1]) == 1.0
    assert abs(bs.mutual_info([0, 0, 1, 3], [0, 0, 1, 1]) - 1.0) < 1e-12
    assert abs(bs.interaction_info([0, 1, 1, 0], [0, 0, 1, 1], [0, 1, 0, 1]) - 1.0) < 1e-12
    assert abs(bs.mi_joined([0, 1, 1, 0], [0, 0, 1, 1], [0, 1, 0, 1]) - 1.0) < 1e-12

    cube, gt = bs.generate_synthetic(width=16, height=16, n_classes=2, n_informative=0,
                                     n_redundant=0, n_noise=0, noise_sigma=0.0,
                                     synergy_pairs=1, seed=1)
    print(cube, gt)
    res = bs.select(cube, gt, algorithm="tmi", k_max=2)
    assert sorted(res.selected) == [1, 2], res.selected
    assert res.trace[0][3] == "init"
    assert res.to_csv().startswith("step,band,score_bits,score_kind,accepted")

    cube, gt = bs.generate_synthetic(seed=3)
    report = bs.sweep(cube, gt, sizes=[1, 2, 4], algorithm="mi")
    for n_bands, acc, bands in report.rows:
        assert len(bands) == n_bands and 0.0 <= acc <= 100.0
    print(report.to_csv(), end="")

    with tempfile.TemporaryDirectory() as d:
        hdr = Path(d) / "c.hdr"
        cube.write(str(hdr), interleave="bip")
        back = bs.HyperCube.load(str(hdr))
        assert (back.width, back.height, back.n_bands) == (cube.width, cube.height, cube.n_bands)
        assert all(math.isclose(a, b, rel_tol=1e-6) for a, b in zip(back.band(1), cube.band(1)))
        try:
            bs.GroundTruth.load(str(Path(d) / "missing.txt"), 32, 32)
        except OSError as e:
            assert "missing.txt" in str(e)
        else:
            raise AssertionError("missing file accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
