import pytest

from hyb.laws import (
    SUITES, run_law_suites, suite_elgot, suite_iota, suite_joint, suite_module,
    suite_monad, suite_tau, suite_theta,
)


@pytest.mark.parametrize("suite", [suite_monad, suite_module, suite_iota,
                                   suite_tau, suite_joint, suite_theta,
                                   suite_elgot])
def test_suite_clean_at_small_size(suite):
    assert suite(seed=3, cases=150) == []


@pytest.mark.parametrize("name", sorted(SUITES))
def test_negative_control_fails(name):
    suite, mutant, param = SUITES[name]
    assert suite(seed=3, cases=120, **{param: mutant}), \
        f"negative control for {name} went silent"


def test_report_shape():
    report = run_law_suites(seed=1, cases=40)
    assert set(report) == set(SUITES)
    for entry in report.values():
        assert entry["cases"] == 40
        assert entry["failures"] == []
        assert entry["mutant_failed"] is True
