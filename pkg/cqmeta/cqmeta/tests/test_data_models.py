import math

import numpy as np
import pytest

from ..exceptions import DimensionMismatch, InvariantViolation, ParameterError
from ..models.data_models import *


def test_hermitian_operator_rejects_non_hermitian():
    with pytest.raises(InvariantViolation):
        HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_operator_is_read_only():
    op = HermitianOperator(np.eye(2))
    assert op.matrix.flags.writeable is False
    assert op.dim == 2
    assert op.trace() == pytest.approx(2.0)


def test_hermitian_operator_block_sizes_must_tile():
    with pytest.raises(InvariantViolation):
        HermitianOperator(np.eye(3), (1, 1))
    op = HermitianOperator(np.eye(3), (1, 2))
    assert op.block_ranges() == [(0, 1), (1, 3)]


def test_hermitian_operator_arithmetic():
    a = HermitianOperator(np.diag([1.0, 2.0]))
    b = HermitianOperator(np.diag([0.5, 0.5]))
    np.testing.assert_allclose((a - b).matrix, np.diag([0.5, 1.5]))
    np.testing.assert_allclose((2 * a).matrix, np.diag([2.0, 4.0]))
    np.testing.assert_allclose((-a).matrix, np.diag([-1.0, -2.0]))
    with pytest.raises(DimensionMismatch):
        a + HermitianOperator(np.eye(3))


def test_density_operator_invariants():
    with pytest.raises(InvariantViolation):
        DensityOperator.from_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvariantViolation):
        DensityOperator.from_matrix(np.diag([0.5, 0.4]))
    rho = DensityOperator.maximally_mixed(4)
    assert rho.trace() == pytest.approx(1.0)
    pure = DensityOperator.pure(np.array([1.0, 1.0j]) / np.sqrt(2))
    np.testing.assert_allclose(pure.matrix @ pure.matrix, pure.matrix, atol=1e-12)


def test_projector_invariants():
    with pytest.raises(InvariantViolation):
        Projector.from_matrix(np.diag([1.0, 0.5]))
    projector = Projector.from_vectors(np.array([[1.0], [0.0], [0.0]]))
    assert projector.rank == 1
    assert Projector.identity(3).rank == 3


def test_povm_must_sum_to_identity():
    with pytest.raises(InvariantViolation):
        Povm.from_matrices([np.diag([1.0, 0.0]), np.diag([0.0, 0.5])])
    with pytest.raises(InvariantViolation):
        Povm.from_matrices([np.diag([1.2, 0.0]), np.diag([-0.2, 1.0])])
    povm = Povm.from_matrices([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    assert povm.size == 2
    assert povm.dim == 2


def test_mary_problem_checks_priors():
    state = DensityOperator.maximally_mixed(2)
    with pytest.raises(InvariantViolation):
        MaryProblem((state, state), (0.5, 0.6))
    with pytest.raises(DimensionMismatch):
        MaryProblem((state, state), (1.0,))
    with pytest.raises(InvariantViolation):
        MaryProblem((state,), (1.0,))
    problem = MaryProblem.uniform([state, state, state])
    assert problem.priors == pytest.approx((1 / 3, 1 / 3, 1 / 3))


def test_np_test_operator_and_theta():
    strict = Projector.from_matrix(np.diag([1.0, 0.0, 0.0]))
    null = Projector.from_matrix(np.diag([0.0, 1.0, 0.0]))
    test = NpTest(1.0, strict, null, 0.25)
    np.testing.assert_allclose(test.operator, np.diag([1.0, 0.25, 0.0]))
    with pytest.raises(InvariantViolation):
        NpTest(1.0, strict, strict, 0.0)


def test_tradeoff_point_range():
    with pytest.raises(InvariantViolation):
        TradeoffPoint(1.5, 0.0)
    point = TradeoffPoint(1.0 + 1e-12, 0.5)
    assert point.alpha == 1.0


def test_input_distribution_from_code_keeps_slots():
    code = Code((2, 1, 2, 3))
    P = InputDistribution.from_code(code)
    assert P.weights == pytest.approx({2: 0.5, 1: 0.25, 3: 0.25})
    assert P.support == (1, 2, 3)
    layout = P.block_layout()
    assert [x for x, _ in layout] == [1, 2, 2, 3]
    assert [w for _, w in layout] == pytest.approx([0.25, 0.25, 0.25, 0.25])


def test_input_distribution_rejects_bad_weights():
    with pytest.raises(InvariantViolation):
        InputDistribution({1: 0.7, 2: 0.7})
    with pytest.raises(InvariantViolation):
        InputDistribution({1: 1.5, 2: -0.5})


def test_label_key_orders_mixed_labels():
    labels = ["b", 3, "a", 1]
    assert sorted(labels, key=label_key) == [1, 3, "a", "b"]


def test_channel_output_lookup():
    channel = Channel({"a": DensityOperator.maximally_mixed(2)})
    assert channel.output_dim == 2
    with pytest.raises(ParameterError):
        channel.output("missing")
    with pytest.raises(ParameterError):
        Code(("missing",)).check_alphabet(channel)


def test_hykl_report_flag_must_match_residuals():
    lam = HermitianOperator(np.eye(2))
    with pytest.raises(InvariantViolation):
        HyklReport(lam, 0.0, (1e-3,), (0.0,), 1e-8, True)
    report = HyklReport(lam, 0.0, (1e-9,), (2e-9,), 1e-8, True)
    assert report.max_residual == pytest.approx(2e-9)


def test_qp_certificate_invariants():
    mu = DensityOperator.maximally_mixed(2)
    with pytest.raises(InvariantViolation):
        QpCertificate(1.0, mu, 0.0, 0.0, 0.1, CertificateStatus.QUASI_PERFECT)
    certificate = QpCertificate(1.0, mu, 0.0, 0.5, 0.0, "quasi_perfect")
    assert certificate.status is CertificateStatus.QUASI_PERFECT
    assert certificate.is_quasi_perfect
    data = certificate.to_dict()
    assert data["status"] == "quasi_perfect"
    assert math.isnan(data["f_open"])


def test_index_partition_helpers():
    basis = (Projector.from_vectors(np.array([[1.0], [0.0]])), Projector.from_vectors(np.array([[0.0], [1.0]])))
    partition = IndexPartition(basis, {0: 1, 1: 0}, {(0, 0): 0.5, (0, 1): 0.0, (1, 0): 0.25})
    assert partition.eps_min(0) == 0.0
    assert partition.total_eps == pytest.approx(0.25)


def test_sweep_grid_parse():
    grid = SweepGrid.parse("p:0:0.5:3")
    assert grid.values() == pytest.approx([0.0, 0.25, 0.5])
    assert SweepGrid.parse("p:0.2:1:1").values() == [0.2]
    with pytest.raises(ParameterError):
        SweepGrid.parse("p:0:1")
    with pytest.raises(ParameterError):
        SweepGrid.parse("p:a:1:3")


def test_default_threads_reads_environment(monkeypatch):
    monkeypatch.setenv("CQMETA_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("CQMETA_THREADS", "zero")
    with pytest.raises(ParameterError):
        default_threads()


def test_run_config_validation(tmp_path):
    with pytest.raises(ParameterError):
        RunConfig(command=Command.SOLVE, threads=1).validate()
    with pytest.raises(ParameterError):
        RunConfig(command=Command.FIGURE1, t_steps=1, threads=1).validate()
    with pytest.raises(ParameterError):
        RunConfig(command="example1", output_format="xml", threads=1).validate()
    config = RunConfig(command="example1", output_path=tmp_path / "out.json", threads=1)
    config.validate()
    assert config.command is Command.EXAMPLE1
