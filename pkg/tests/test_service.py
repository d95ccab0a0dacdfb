import numpy as np
import pandas as pd
import pytest

from app.errors import InvalidParameter, NoDecomposition
from app.numeric import DenseMatrix
from app.registry import FactoredElement, identity_element, sample_factored, spec
from app.service import REPORT_COLUMNS, HarnessService, SweepConfig, Thresholds, format_report, harness_service


def test_identity_element_passes():
    fe = identity_element(spec("F9", 1, n=3, p=2, q=1))
    report = harness_service.verify(fe)
    assert report.passed
    assert report.reconstruction == 0.0
    assert report.worst_factor == 0.0
    assert "PASS" in report.summary()


def test_perturbed_element_fails(rng):
    fe = sample_factored(spec("F18", 1, p=2, q=1), rng)
    data = fe.g.data.copy()
    data[0, 1] += 1e-3
    broken = FactoredElement(fe.spec, fe.k1_raw, fe.theta, fe.k2_raw, fe.k1, fe.a, fe.k2, DenseMatrix(fe.g.field, data))
    report = harness_service.verify(broken)
    assert not report.passed
    assert report.reconstruction > 1e-4
    assert "FAIL" in report.summary()


def test_sample_passes(rng):
    report = harness_service.verify(sample_factored(spec("F9", 2, n=3, p=2, q=1), rng), seed=3)
    assert report.passed
    assert report.seed == 3
    assert report.angle_violations == 0


def test_roundtrip_report(rng):
    report = harness_service.roundtrip(spec("F7", 4, n=2), rng)
    assert report.passed
    assert report.roundtrip_deviation < 1e-8
    assert "decompose" in report.timings_ms


def test_roundtrip_without_algorithm(rng):
    with pytest.raises(NoDecomposition):
        harness_service.roundtrip(spec("F23", 2, n=3), rng)


def test_thresholds():
    default = Thresholds()
    scaled = Thresholds.scaled(default.membership * 10)
    assert scaled.membership == pytest.approx(default.membership * 10)
    assert scaled.factor == pytest.approx(default.factor * 10)
    with pytest.raises(InvalidParameter):
        Thresholds.scaled(0.0)
    assert "membership=" in default.header()


def test_configure():
    service = HarnessService()
    service.configure(tol=1e-6, scale=0.2)
    assert service.thresholds.membership == pytest.approx(1e-6)
    assert service.scale == 0.2
    service.configure()
    assert service.thresholds == Thresholds()
    with pytest.raises(InvalidParameter):
        service.configure(scale=-1.0)


@pytest.mark.parametrize("kwargs", [{"trials": 0}, {"sizes": []}, {"sizes": [0, 2]}, {"workers": 0}])
def test_sweep_config_validation(kwargs):
    with pytest.raises(InvalidParameter):
        SweepConfig(**kwargs)


def test_sweep_config_filter():
    config = SweepConfig(cell_filter=["F7", "f9/c"])
    assert config.selects("F7", 4)
    assert config.selects("F9", 2)
    assert not config.selects("F9", 1)
    assert SweepConfig().selects("F25", 2)


# ============================================================
# VARREDURA
# ============================================================


def test_sweep_filtered(tmp_path):
    service = HarnessService()
    config = SweepConfig(
        sizes=[2],
        trials=1,
        cell_filter=["F7"],
        report_path=str(tmp_path / "report.txt"),
        csv_path=str(tmp_path / "report.csv"),
        xlsx_path=str(tmp_path / "report.xlsx"),
    )
    df = service.sweep(config)
    assert list(df["cell"]) == ["F7/R", "F7/C", "F7/H"]
    assert list(df.columns) == REPORT_COLUMNS + ["elapsed_ms"]
    assert df["passed"].all()
    assert not df["roundtrip"].isna().any()

    text = (tmp_path / "report.txt").read_text(encoding="utf-8")
    assert text.startswith("# varredura")
    assert text.rstrip().endswith("# total 3/3 aprovadas")
    assert len(pd.read_csv(tmp_path / "report.csv")) == 3
    assert len(pd.read_excel(tmp_path / "report.xlsx")) == 3

    status = service.get_status()
    assert status["tasks"] == 3
    assert status["passed"] == 3
    assert status["failed_cells"] == []


def test_sweep_is_reproducible(tmp_path):
    paths = [tmp_path / "a.txt", tmp_path / "b.txt"]
    for path, workers in zip(paths, (1, 3)):
        config = SweepConfig(sizes=[2, 3], trials=2, seed=11, cell_filter=["F4", "F18"], report_path=str(path), workers=workers)
        HarnessService().sweep(config)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_compose_only_cells_have_no_roundtrip():
    df = HarnessService().sweep(SweepConfig(sizes=[3], trials=1, cell_filter=["F23/C"]))
    assert len(df) == 1
    assert np.isnan(df.loc[0, "roundtrip"])
    assert bool(df.loc[0, "passed"])


def test_numeric_failure_does_not_abort_sweep(monkeypatch):
    def broken(*args, **kwargs):
        raise np.linalg.LinAlgError("SVD did not converge")

    monkeypatch.setattr("app.service.decompose", broken)
    df = HarnessService().sweep(SweepConfig(sizes=[3], trials=1, cell_filter=["F7", "F23/C"]))
    assert list(df["cell"]) == ["F7/R", "F7/C", "F7/H", "F23/C"]
    failed = df[df["cell"].str.startswith("F7/")]
    assert not failed["passed"].any()
    assert failed["error"].str.startswith("LinAlgError").all()
    assert bool(df.loc[3, "passed"])


def test_format_report_of_empty_sweep():
    config = SweepConfig(sizes=[1], trials=1)
    text = format_report(pd.DataFrame(columns=REPORT_COLUMNS + ["elapsed_ms"]), config)
    assert text.splitlines()[-1] == "# total 0/0 aprovadas"


def test_status_before_sweep():
    status = HarnessService().get_status()
    assert status["last_sweep"] is None
    assert status["tasks"] == 0
