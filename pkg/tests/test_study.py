import numpy as np
import pytest

from superpose_net import (
    InsufficientSupport,
    LayerTypeDistribution,
    LimitParams,
    Pmf1D,
    Pmf2D,
    StudySpec,
    limiting_assortativity,
    limiting_rank_correlations,
    run_study,
    tail_slope_fit,
    tv_distance_1d,
    tv_distance_2d,
)


def delta1d(k):
    p = np.zeros(k + 1)
    p[k] = 1.0
    return Pmf1D(p)


class TestTvDistance:
    def test_identical_is_zero(self):
        f = Pmf1D(np.array([0.5, 0.5]))
        assert tv_distance_1d(f, f) == 0.0

    def test_disjoint_supports(self):
        assert tv_distance_1d(delta1d(0), delta1d(1)) == 1.0

    def test_half(self):
        assert tv_distance_1d(Pmf1D(np.array([0.5, 0.5])), delta1d(0)) == pytest.approx(0.5)

    def test_mass_defect_counts(self):
        f = Pmf1D(np.array([0.9]), mass_defect=0.1)
        g = Pmf1D(np.array([0.9]), mass_defect=0.1)
        assert tv_distance_1d(f, g) == pytest.approx(0.1)

    def test_2d(self):
        a = Pmf2D(np.array([[1.0]]))
        b = Pmf2D(np.array([[0.0, 0.5], [0.5, 0.0]]))
        assert tv_distance_2d(a, a) == 0.0
        assert tv_distance_2d(a, b) == 1.0


class TestTailSlopeFit:
    def _power_pmf(self, exponent, lo=1, hi=500):
        t = np.arange(hi + 1, dtype=float)
        p = np.zeros(hi + 1)
        p[lo:] = t[lo:] ** -exponent
        return Pmf1D(p / p.sum())

    def test_exact_power_law_slope_two(self):
        slope, stderr = tail_slope_fit(self._power_pmf(2.0), (10, 500))
        assert slope == pytest.approx(2.0, abs=0.01)
        assert stderr < 0.01

    def test_exact_power_law_slope_125(self):
        slope, _ = tail_slope_fit(self._power_pmf(1.25), (10, 500))
        assert slope == pytest.approx(1.25, abs=0.01)

    def test_insufficient_support(self):
        with pytest.raises(InsufficientSupport):
            tail_slope_fit(self._power_pmf(2.0, hi=12), (10, 500))


class TestRunStudy:
    SPEC = dict(
        dist=LayerTypeDistribution.tabular([(2, 1.0, 0.5), (4, 1.0, 0.5)]),
        mu=1.0,
        n_grid=(200, 500),
        replications=3,
        seed=99,
        metrics=("tv1", "tv2", "assortativity", "kendall", "spearman"),
    )

    def test_deterministic(self):
        a = run_study(StudySpec(**self.SPEC))
        b = run_study(StudySpec(**self.SPEC))
        assert a.rows == b.rows
        assert a.summary == b.summary
        assert a.theory == b.theory

    def test_threads_do_not_change_results(self):
        a = run_study(StudySpec(**self.SPEC))
        b = run_study(StudySpec(**self.SPEC, threads=4))
        assert a.rows == b.rows
        assert a.summary == b.summary

    def test_theory_row_matches_limit_module_bitwise(self):
        report = run_study(StudySpec(**self.SPEC))
        params = LimitParams(self.SPEC["mu"], self.SPEC["dist"], 1e-10)
        rc = limiting_rank_correlations(params)
        assert report.theory["assortativity"] == limiting_assortativity(params)
        assert report.theory["kendall"] == rc.kendall
        assert report.theory["spearman"] == rc.spearman

    def test_rows_have_standard_errors(self):
        report = run_study(StudySpec(**self.SPEC))
        for n in self.SPEC["n_grid"]:
            agg = report.summary[str(n)]
            assert agg["tv1"]["count"] == 3
            assert agg["tv1"]["se"] is not None

    def test_subgraph_metric(self):
        spec = StudySpec(
            dist=LayerTypeDistribution.constant(4, 1.0), mu=0.5,
            n_grid=(100,), replications=2, seed=1, metrics=("subgraph_counts",),
        )
        report = run_study(spec)
        agg = report.summary["100"]
        assert agg["links"]["mean"] == 6.0
        assert agg["two_stars"]["mean"] == 12.0
        assert agg["three_stars"]["mean"] == 4.0
        assert report.theory["links"] == 6.0

    def test_report_serialization(self, tmp_path):
        report = run_study(StudySpec(**self.SPEC))
        report.to_csv(tmp_path / "r.csv")
        report.to_json(tmp_path / "r.json")
        header = (tmp_path / "r.csv").read_text().splitlines()[0]
        assert header == "n,replication,metric,value,note"

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            StudySpec(dist=self.SPEC["dist"], mu=1.0, n_grid=(500, 200),
                      replications=1, seed=0)
        with pytest.raises(ValueError):
            StudySpec(dist=self.SPEC["dist"], mu=1.0, n_grid=(200,),
                      replications=1, seed=0, metrics=("bogus",))
