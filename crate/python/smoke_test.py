"""Smoke test for the anomaly_forge extension module.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/anomaly_forge-*.whl
"""

import math

import anomaly_forge as af


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    au = af.UnitSystem()
    assert au.a0 == 1.0

    coulomb = af.PotentialSpec("coulomb:Z=1")
    assert coulomb.evaluate(2.0) == -0.5
    assert close(coulomb.fourier_transform_at(2.0), math.pi, 1e-14)
    assert coulomb.classify() == (1.0, "B", "coulomb")
    assert af.PotentialSpec("inverse-square:alpha=50").classify()[1] == "A"

    w2, err = af.compute_w2(coulomb, 10.0)
    assert close(w2, af.w2_closed_form(1.0, 10.0), 1e-3), (w2, err)

    samples = af.sample_w(coulomb, [10.0 * 10 ** (i / 11) for i in range(12)], order="second")
    assert len(samples) == 12 and samples.source == "second-order"
    assert samples.to_csv().startswith("lambda,w,err,source\n")
    result = af.analyze(samples)
    assert result.status_e == "finite" and result.status_n == "zero"
    assert close(result.a_e, af.delta_ae_case_b_closed_form(1.0), 0.01)
    assert "a_e_reduced=0.2500" in result.report()

    fit = af.fit_power_law([1.0, 2.0, 4.0, 8.0], [2.0, 1.0, 0.5, 0.25])
    assert close(fit.amplitude, 2.0, 1e-12) and close(fit.gamma, 1.0, 1e-12)

    first = af.analyze(af.sample_w(coulomb, [10.0, 30.0, 100.0, 300.0, 1000.0], order="first"))
    assert first.status_e == "divergent" and abs(first.growth_e - 0.5) < 0.05

    synthetic = af.make_samples(coulomb, [1.0, 10.0, 100.0, 1000.0], [5.0, 0.5, 0.05, 0.005])
    assert close(af.analyze(synthetic).a_n, 10.0, 1e-10)

    inv_sq = af.PotentialSpec("inverse-square:alpha=50")
    w, _ = af.oracle_w(inv_sq, 10.0)
    assert close(w * 10.0, -0.4163016, 1e-3), w

    passed, text = af.run_reproduction("case-b-energy", z=2.0)
    assert passed, text

    try:
        af.PotentialSpec("coulomb:Q=1")
    except ValueError:
        pass
    else:
        raise AssertionError("bad spec accepted")
    try:
        af.fit_power_law([1.0, 2.0, 4.0, 8.0], [1.0, -1.0, 1.0, -1.0])
    except af.ConvergenceError:
        pass
    else:
        raise AssertionError("mixed-sign fit accepted")

    print("smoke test OK")


if __name__ == "__main__":
    main()
