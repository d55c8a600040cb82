import csv

from codelens import (
    AccuracyReport,
    CodeAxis,
    CodeSpace,
    DistanceMetric,
    SpaceTag,
    SynthParams,
    compare_reports,
    run_bias_sweep,
)
from codelens.report import (
    render_delta_figure,
    render_report_figure,
    render_sweep_figure,
    write_delta_csv,
    write_report_csv,
    write_sweep_csv,
)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def sample_report(n_correct=7):
    return AccuracyReport(space=SpaceTag.SHAPE, code_axis=CodeAxis.SHAPE,
                          metric=DistanceMetric.COSINE, n_queries=10,
                          n_correct=n_correct, per_code={0: (3, 5), 1: (n_correct - 3, 5)})


def test_report_csv_rows(tmp_path):
    path = tmp_path / "r.csv"
    write_report_csv(sample_report(), path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["code", "n_correct", "n_total", "accuracy"]
    assert rows[1] == ["0", "3", "5", "0.6"]
    assert rows[2] == ["1", "4", "5", "0.8"]
    assert rows[3] == ["overall", "7", "10", "0.7"]


def test_delta_csv_rows(tmp_path):
    delta = compare_reports(sample_report(8), sample_report(7))
    path = tmp_path / "d.csv"
    write_delta_csv(delta, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["code", "primary_accuracy", "compare_accuracy", "delta"]
    assert rows[-1][0] == "overall"
    assert float(rows[-1][3]) == delta.accuracy_delta


def test_sweep_csv_rows(tmp_path):
    space = CodeSpace(n_shape=2, n_texture=2, n_noise=2)
    biased = SynthParams(dim=8, w_shape=4.0, w_texture=1.0, w_noise=0.2,
                         sigma=0.2, seed=0)
    unbiased = SynthParams(dim=8, w_shape=1.0, w_texture=1.0, w_noise=0.2,
                           sigma=0.2, seed=0)
    sweep = run_bias_sweep(space, biased, unbiased, seeds=[1, 2])
    path = tmp_path / "s.csv"
    write_sweep_csv(sweep, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["seed", "biased_accuracy", "unbiased_accuracy", "delta"]
    assert [row[0] for row in rows[1:]] == ["1", "2", "mean"]
    assert float(rows[-1][3]) == sweep.mean_delta


def test_figures_render_valid_deterministic_pngs(tmp_path):
    report = sample_report()
    delta = compare_reports(sample_report(8), sample_report(7))
    space = CodeSpace(n_shape=2, n_texture=2, n_noise=2)
    sweep = run_bias_sweep(

        space,
        SynthParams(dim=8, w_shape=4.0, w_texture=1.0, seed=0),
        SynthParams(dim=8, w_shape=1.0, w_texture=1.0, seed=0),
        seeds=[1, 2],
    )
    for name, render, payload in [
        ("report", render_report_figure, report),
        ("delta", render_delta_figure, delta),
        ("sweep", render_sweep_figure, sweep),
    ]:
        first, second = tmp_path / f"{name}_a.png", tmp_path / f"{name}_b.png"
        render(payload, first)
        render(payload, second)
        blob = first.read_bytes()
        assert blob[:8] == PNG_MAGIC
        assert len(blob) > 1000
        assert blob == second.read_bytes()


def test_csv_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_report_csv(sample_report(), a)
    write_report_csv(sample_report(), b)
    assert a.read_bytes() == b.read_bytes()
