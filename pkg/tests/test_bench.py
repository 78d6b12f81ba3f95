import numpy as np
import pytest

from shgoints import bench


def test_small_bench(tmp_path):
    rows = bench.run_bench("nuclear", 2, 2, 1)
    assert [r.l for r in rows] == [0, 1, 2]
    assert all(r.shgo.wall_ns > 0 and r.cgto.wall_ns > 0 for r in rows)
    assert all(r.max_abs_diff <= 1e-10 for r in rows)
    bench.write_csv(rows, tmp_path / "b.csv")
    got = bench.read_csv(tmp_path / "b.csv")
    assert tuple(got[0]) == bench.CSV_COLUMNS
    assert [int(g["l"]) for g in got] == [0, 1, 2]
    text = bench.report(rows)
    assert "schema v1" in text and "scaling fit" not in text


def test_eri_bench_runs():
    rows = bench.run_bench("eri", 1, 1, 1)
    assert len(rows) == 2 and all(r.max_abs_diff <= 1e-10 for r in rows)


def test_centers_geometry():
    c = bench.centers("eri")
    d = [np.linalg.norm(c[i] - c[j]) for i in range(4) for j in range(i)]
    np.testing.assert_allclose(d, 1.5)
    assert np.linalg.norm(np.diff(bench.centers("nuclear"), axis=0)) == pytest.approx(1.5)


def test_fit_and_model():
    ls = [2, 3, 4, 5]
    assert bench.fit_exponent(ls, [(l + 1) ** 3 for l in ls]) == pytest.approx(3.0)
    c, s = bench.op_count_model(0, 10)
    assert c > s
    c7, s7 = bench.op_count_model(7, 10)
    assert c7 / s7 > 1e4


def test_bad_arguments():
    with pytest.raises(ValueError):
        bench.run_bench("nuclear", -1, 1, 1)
    with pytest.raises(ValueError):
        bench.bench_one("kinetic", 0, 1, 1)
