import numpy as np
import pytest

from ddphase.classical import ClassicalSignal
from ddphase.core import ControlErrors
from ddphase.disambiguation import (
    PeakClass,
    PhaseCycleSet,
    SequenceSpec,
    Spectrum,
    SweepConfig,
    SweepError,
    WitnessReport,
    classify_peaks,
    dominant_peak,
    harmonic_guess,
    run_sweep,
    witness,
)
from ddphase.sequences import SequenceKind

MHZ = 2 * np.pi * 1e6


def xy8_config(alphas, signals, phases=(0.0, np.pi / 4, -np.pi / 4), n_units=1, rabi=10 * MHZ, **kw):
    return SweepConfig(
        alphas=tuple(alphas),
        sequence=SequenceSpec(SequenceKind.XY8, n_units, rabi),
        phases=phases,
        signals=tuple(signals),
        **kw,
    )


def pcs_from(rows, phases=(0.0, 1.0, 2.0)):
    rows = np.asarray(rows, dtype=float)
    return PhaseCycleSet(np.arange(1, rows.shape[1] + 1, dtype=float), np.array(phases[: rows.shape[0]]), rows)


def test_witness_arithmetic():
    pcs = pcs_from([[0.2], [0.5], [0.3]])
    assert witness(pcs).w == pytest.approx([0.3])


def test_witness_single_phase_is_zero():
    pcs = pcs_from([[0.1, 0.7, 0.3]])
    assert np.all(witness(pcs).w == 0)


def test_witness_identical_spectra():
    pcs = pcs_from([[0.1, 0.7, 0.3]] * 3)
    assert np.all(witness(pcs).w == 0)


def test_grid_mismatch():
    a = Spectrum(np.array([1.0, 2.0]), np.array([0.1, 0.2]))
    b = Spectrum(np.array([1.0, 2.5]), np.array([0.1, 0.2]))
    with pytest.raises(ValueError, match="grid"):
        PhaseCycleSet.from_spectra({0.0: a, 1.0: b})
    with pytest.raises(ValueError):
        PhaseCycleSet(np.array([1.0, 2.0]), np.array([0.0]), np.zeros((2, 2)))
    pcs = pcs_from([[0.1, 0.2, 0.1]])
    bad = WitnessReport(alphas=np.array([1.0]), w=np.array([0.0]))
    with pytest.raises(ValueError):
        classify_peaks(pcs, bad)


def test_from_spectra_roundtrip():
    grid = np.array([1.0, 2.0, 3.0])
    spectra = {0.0: Spectrum(grid, np.array([0.1, 0.2, 0.3])), 0.5: Spectrum(grid, np.array([0.3, 0.2, 0.1]))}
    pcs = PhaseCycleSet.from_spectra(spectra)
    assert pcs.spectra[0.5].probabilities.tolist() == [0.3, 0.2, 0.1]
    assert pcs.spectrum(0).points()[1] == (2.0, 0.2)


def test_classification_thresholds():
    # three isolated peaks with witness ratios 0.5, 0.01 and 0.1
    rows = [
        [0, 0.4, 0, 0.50, 0, 0.50, 0],
        [0, 0.8, 0, 0.495, 0, 0.45, 0],
    ]
    report = classify_peaks(pcs_from(rows))
    labels = [p.classification for p in report.peaks]
    assert labels == [PeakClass.SPURIOUS, PeakClass.REAL, PeakClass.INCONCLUSIVE]
    assert report.peaks[0].height == pytest.approx(0.8)
    assert report.peaks[0].w_at_peak == pytest.approx(0.4)


def test_min_height_and_flat():
    assert classify_peaks(pcs_from([[0.01, 0.015, 0.01]])).peaks == ()
    assert classify_peaks(pcs_from([[0.2, 0.2, 0.2, 0.2]])).peaks == ()


@pytest.mark.parametrize("kw", [{"rel_threshold": 0.0}, {"rel_threshold": 1.0}, {"min_height": 0.0}, {"min_height": 1.5}])
def test_threshold_domain(kw):
    with pytest.raises(ValueError):
        classify_peaks(pcs_from([[0, 1, 0]]), **kw)


def test_quadratic_refinement():
    x = np.linspace(0.9, 1.1, 21)
    y = 0.5 - 30 * (x - 1.003) ** 2
    pcs = PhaseCycleSet(x, np.array([0.0]), y[None, :])
    plain = classify_peaks(pcs).peaks[0]
    refined = classify_peaks(pcs, refine=True).peaks[0]
    assert plain.alpha_at_peak == pytest.approx(1.0)
    assert refined.alpha_at_peak == pytest.approx(1.003, abs=1e-9)


@pytest.mark.parametrize(
    "alpha,guess", [(1.0, (1, 1)), (0.3334, (1, 3)), (2.001, (2, 1)), (4.0, (4, 1)), (4 / 3, (4, 3)), (0.8, (4, 5))]
)
def test_harmonic_guess(alpha, guess):
    assert harmonic_guess(alpha) == guess


def test_sweep_config_validation():
    sig = (ClassicalSignal(0.1 * MHZ, MHZ),)
    with pytest.raises(ValueError):
        xy8_config([1.0, 0.9], sig)
    with pytest.raises(ValueError):
        xy8_config([], sig)
    with pytest.raises(ValueError):
        xy8_config([1.0], sig, phases=(0.0, 2 * np.pi))
    with pytest.raises(ValueError):
        xy8_config([1.0], sig, phases=())
    with pytest.raises(ValueError):
        xy8_config([1.0], ())
    with pytest.raises(ValueError):
        SequenceSpec(SequenceKind.AXY8_F1, 1, MHZ)


def test_zero_amplitude_flat_spectrum():
    cfg = xy8_config(np.linspace(0.5, 4, 15), [ClassicalSignal(0.0, MHZ)], phases=(0.3,))
    pcs = run_sweep(cfg)
    assert pcs.probabilities.shape == (1, 15)
    assert np.all(pcs.probabilities < 1e-20)


def test_single_point_grid():
    cfg = xy8_config([1.0], [ClassicalSignal(0.05 * MHZ, MHZ)])
    pcs = run_sweep(cfg)
    assert pcs.probabilities.shape == (3, 1)
    assert witness(pcs).w.shape == (1,)


def test_parallel_sweep_is_deterministic():
    cfg = xy8_config(np.linspace(0.8, 4.2, 24), [ClassicalSignal(0.12 * MHZ, MHZ)])
    serial = run_sweep(cfg)
    parallel = run_sweep(cfg, workers=3)
    assert np.array_equal(serial.probabilities, parallel.probabilities)


def test_errors_name_the_grid_point():
    # the finite pulse no longer fits between grid points at large alpha
    cfg = xy8_config([1.0, 2.0, 30.0], [ClassicalSignal(0.12 * MHZ, MHZ)], rabi=5 * MHZ)
    with pytest.raises(SweepError, match=r"grid point 2 \(alpha=30\)"):
        run_sweep(cfg)


def test_nodes_give_no_phase_contrast():
    """With the tone's nodes on the pulses the fundamental resonance is phase independent."""
    cfg = xy8_config([1.0], [ClassicalSignal(0.12 * MHZ, MHZ, np.pi / 2)])
    assert witness(run_sweep(cfg)).w[0] <= 1e-9


def test_fundamental_real_harmonic_spurious():
    grid = np.concatenate([np.linspace(0.9, 1.1, 41), np.linspace(1.9, 2.1, 41)])
    cfg = xy8_config(grid, [ClassicalSignal(0.1 * MHZ, MHZ)], n_units=2, rabi=6 * MHZ)
    report = classify_peaks(run_sweep(cfg), min_height=1e-3)
    assert dominant_peak(report, 0.9, 1.1).classification is PeakClass.REAL
    second = dominant_peak(report, 1.9, 2.1)
    assert second.classification is PeakClass.SPURIOUS
    assert second.harmonic_guess == (2, 1)


def _weak_tone_report(strong):
    weak = ClassicalSignal(0.005 * MHZ, 4 * MHZ, np.pi / 2)
    signals = [ClassicalSignal(0.1 * MHZ, MHZ)] if strong else []
    cfg = xy8_config(np.linspace(3.8, 4.2, 41), signals + [weak], n_units=2, rabi=10 * MHZ, reference_omega=MHZ)
    return classify_peaks(run_sweep(cfg), min_height=1e-4)


def test_one_directionality():
    """A genuine tone at 4 w sitting on the spurious alpha = 4 line of a tone at w is not labelled real."""
    alone = dominant_peak(_weak_tone_report(strong=False), 3.9, 4.1)
    assert alone.classification is PeakClass.REAL
    mixed = dominant_peak(_weak_tone_report(strong=True), 3.9, 4.1)
    assert mixed.classification in (PeakClass.SPURIOUS, PeakClass.INCONCLUSIVE)


def test_witness_permutation_and_monotonicity():
    rng = np.random.default_rng(3)
    p = rng.uniform(size=(4, 30))
    pcs = PhaseCycleSet(np.arange(30.0), np.arange(4.0), p)
    perm = PhaseCycleSet(np.arange(30.0), np.arange(4.0)[::-1], p[::-1])
    assert np.array_equal(witness(pcs).w, witness(perm).w)
    fewer = PhaseCycleSet(np.arange(30.0), np.arange(3.0), p[:3])
    assert np.all(witness(fewer).w <= witness(pcs).w)
