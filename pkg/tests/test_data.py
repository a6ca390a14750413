import numpy as np  # type: ignore
import pytest

from kdpc.data import ExcitationConfig, assemble_dataset, check_pe, collect_trajectories, generate_excitation, \
    load_dataset, save_dataset
from kdpc.kernels import KernelSpec, make_kernel, median_bandwidth
from kdpc.plants import VanDerPolPlant
from kdpc.structs import Trajectory
from kdpc.utils.checks import ArtifactError, ContractViolationError
from kdpc.utils.io import write_matrix
from tests.conftest import T_INI


def _toy_trajectory(length: int = 6) -> Trajectory:
    k = np.arange(length, dtype=np.float64)
    return Trajectory(u=k ** 2, y=10.0 * k)


def test_excitation_is_held_and_bounded():
    cfg = ExcitationConfig(length=31, amplitude=0.5, hold_steps=3, seed=4)
    signal = generate_excitation(cfg)
    assert signal.shape == (31,)
    assert np.all(np.abs(signal) <= 0.5)
    for start in range(0, 30, 3):
        assert np.all(signal[start:start + 3] == signal[start])
    np.testing.assert_array_equal(signal, generate_excitation(cfg))


def test_excitation_config_validation():
    with pytest.raises(ContractViolationError):
        ExcitationConfig(hold_steps=0)
    with pytest.raises(ContractViolationError):
        ExcitationConfig(levels=())
    with pytest.raises(ContractViolationError):
        ExcitationConfig(amplitude=-1.0)


def test_windows_follow_time_alignment():
    dataset = assemble_dataset([_toy_trajectory()], t_ini=2, n_horizon=2)
    assert dataset.size == 2
    # u = k^2, so the increment ending at sample k is 2k - 1; y = 10k
    np.testing.assert_array_equal(dataset.d_ini[:, 0], [1, 3, 10, 20])
    np.testing.assert_array_equal(dataset.d_f_u[:, 0], [5, 7])
    np.testing.assert_array_equal(dataset.y_f[:, 0], [30, 40])
    np.testing.assert_array_equal(dataset.d_ini[:, 1], [3, 5, 20, 30])
    np.testing.assert_array_equal(dataset.d_f_u[:, 1], [7, 9])
    np.testing.assert_array_equal(dataset.y_f[:, 1], [40, 50])
    np.testing.assert_array_equal(dataset.u_pre, [[0, 1]])


def test_stride_skips_windows():
    assert assemble_dataset([_toy_trajectory(10)], t_ini=2, n_horizon=2, stride=2).size == 3


def test_short_trajectory_is_named():
    with pytest.raises(ContractViolationError, match="trajectory 1"):
        assemble_dataset([_toy_trajectory(), _toy_trajectory(4)], t_ini=2, n_horizon=2)


def test_default_collection_size(benchmark_dataset):
    # 6 levels x 12 antithetic pairs, mirrored, plus 10 rest runs per level, mirrored except the origin rest run
    assert benchmark_dataset.size == 407
    assert benchmark_dataset.d_ini.shape == (20, 407)
    assert benchmark_dataset.d_f_u.shape == (15, 407)
    assert benchmark_dataset.y_f.shape == (15, 407)


def test_rest_windows_are_at_equilibrium():
    cfg = ExcitationConfig(length=8, levels=(0.0, 0.5), bursts=0)
    trajectories = collect_trajectories(VanDerPolPlant(), cfg, 3, 4)
    # a rest run and two pulsed runs per level; the origin rest run is its own mirror
    assert len(trajectories) == 11
    rest, mirrored = trajectories[3], trajectories[8]
    assert len(rest) == 8
    np.testing.assert_allclose(rest.y[:, 0], 0.5, atol=1e-12)
    np.testing.assert_allclose(mirrored.y[:, 0], -0.5, atol=1e-12)

    dataset = assemble_dataset(trajectories, 3, 4)
    # pulses stay inside the past window, so no rest window has a future increment
    np.testing.assert_allclose(dataset.d_f_u, 0.0, atol=1e-12)
    np.testing.assert_allclose(dataset.d_ini[:3, 1], [0.05, -0.05, 0.0], atol=1e-12)
    np.testing.assert_allclose(dataset.d_ini[:3, 2], [0.0, 0.05, -0.05], atol=1e-12)


def test_antithetic_partner_negates_the_future():
    cfg = ExcitationConfig(length=8, levels=(0.5,), bursts=3, mirror=False, rest_windows=False)
    dataset = assemble_dataset(collect_trajectories(VanDerPolPlant(), cfg, 3, 4), 3, 4)
    assert dataset.size == 6
    for primary in range(0, 6, 2):
        partner = primary + 1
        assert np.any(dataset.d_f_u[:, primary] != 0.0)
        np.testing.assert_allclose(dataset.d_f_u[:, partner], -dataset.d_f_u[:, primary], atol=1e-12)
        np.testing.assert_allclose(dataset.d_ini[:3, partner] - dataset.d_ini[:3, primary], [0.05, -0.05, 0.0],
                                   atol=1e-12)
        np.testing.assert_array_equal(dataset.u_pre[:, partner], dataset.u_pre[:, primary])


def test_mirrored_runs_are_exact_negations():
    cfg = ExcitationConfig(length=8, levels=(0.5,), bursts=1, rest_windows=False)
    trajectories = collect_trajectories(VanDerPolPlant(), cfg, 3, 4)
    assert len(trajectories) == 4
    for original, mirrored in zip(trajectories[:2], trajectories[2:]):
        np.testing.assert_array_equal(mirrored.u, -original.u)
        np.testing.assert_array_equal(mirrored.y, -original.y)


def test_future_increments_are_uncorrelated_with_the_past(benchmark_dataset):
    # the antithetic pulse only touches the first two past increments
    cross = benchmark_dataset.d_f_u @ benchmark_dataset.d_ini[2:T_INI].T
    assert np.abs(cross).max() <= 1e-9
    np.testing.assert_allclose(benchmark_dataset.d_f_u.mean(axis=1), 0.0, atol=1e-12)


def test_collection_needs_one_window():
    with pytest.raises(ContractViolationError):
        collect_trajectories(VanDerPolPlant(), ExcitationConfig(length=10), 10, 15)
    with pytest.raises(ContractViolationError):
        ExcitationConfig(bursts=-1)
    with pytest.raises(ContractViolationError):
        ExcitationConfig(pulse=-0.1)


def test_collection_is_seeded():
    plant = VanDerPolPlant()

    def digest(seed: int) -> str:
        cfg = ExcitationConfig(length=8, bursts=2, seed=seed)
        return assemble_dataset(collect_trajectories(plant, cfg, 3, 4), 3, 4).digest()

    assert digest(3) == digest(3)
    assert digest(3) != digest(4)


def test_benchmark_gram_is_positive_definite(benchmark_dataset):
    kernel = make_kernel(KernelSpec(bandwidth=median_bandwidth(benchmark_dataset.d_ini)))
    lambda_min = check_pe(kernel.gram(benchmark_dataset.d_ini))
    assert lambda_min >= -1e-10
    assert lambda_min > 0


def test_pe_check_rejects_asymmetric_matrix():
    with pytest.raises(ContractViolationError):
        check_pe(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_dataset_storage(tmp_path):
    dataset = assemble_dataset([_toy_trajectory(9)], t_ini=2, n_horizon=3)
    save_dataset(dataset, tmp_path, note="toy")
    loaded = load_dataset(tmp_path)
    assert loaded.digest() == dataset.digest()
    np.testing.assert_array_equal(loaded.u_pre, dataset.u_pre)

    write_matrix(tmp_path / "y_f.csv", dataset.y_f + 1.0)
    with pytest.raises(ArtifactError):
        load_dataset(tmp_path)


def test_missing_dataset(tmp_path):
    with pytest.raises(ArtifactError):
        load_dataset(tmp_path / "nowhere")
