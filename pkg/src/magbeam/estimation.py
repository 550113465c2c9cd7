"""Coupling-matrix (magnetic MIMO channel) estimation from training slots.

During training, known source voltages are applied slot by slot and the
resulting TX currents are measured locally while each receiver feeds back
its own (noisy) current.  Writing the slot voltages/currents as matrices,
the TX-side quantities combine into ``G = (j/w) (H - F Y)`` which equals
``M Z`` exactly, so the coupling matrix M is recovered by inverting the
receiver-current matrix (perfect feedback) or by a least-squares fit that
stays real-valued by construction (noisy feedback).
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .circuit import Scenario, build_impedance
from .errors import EstimationError, ScenarioError

RANDOM_VOLTAGE = "random_voltage"
BLOCK_SINGLE_TX = "block_single_tx"

OPEN_CIRCUIT = "open_circuit"
DRIVEN_ZERO = "driven_zero"

_COND_LIMIT = 1e12
_CHUNK = 8192


@dataclass(frozen=True)
class TrainingProtocol:
    """How the training voltages are applied across the T slots.

    ``inactive_tx`` only matters in block mode: ``open_circuit`` breaks the
    loop of every idle TX (it carries no current and its port reads the
    induced EMF), ``driven_zero`` keeps idle loops closed behind a 0 V
    source so the strong TX-TX coupling lets them conduct.
    """

    mode: str = BLOCK_SINGLE_TX
    n_slots: int = 10
    active_voltage: float = 0.75
    seed: int = 0
    inactive_tx: str = OPEN_CIRCUIT

    def __post_init__(self):
        if self.mode not in (RANDOM_VOLTAGE, BLOCK_SINGLE_TX):
            raise ValueError(f"unknown training mode {self.mode!r}")
        if self.inactive_tx not in (OPEN_CIRCUIT, DRIVEN_ZERO):
            raise ValueError(f"unknown inactive-TX model {self.inactive_tx!r}")
        if self.n_slots < 1:
            raise ValueError("need at least one training slot")


@dataclass(frozen=True)
class TrainingRecord:
    """Matrices of one training session plus the noise level used."""

    scenario: Scenario
    h: np.ndarray            # applied TX voltages, N x T
    y: np.ndarray            # TX currents, N x T
    z: np.ndarray            # true RX currents, Q x T
    z_tilde: np.ndarray      # fed-back RX currents (noisy), Q x T
    f: np.ndarray            # TX-side impedance bookkeeping matrix, N x N
    g: np.ndarray            # (j/w)(H - F Y) = M Z, N x T
    sigma2: float
    snr_db: float

    @property
    def n_slots(self):
        return self.h.shape[1]


@dataclass(frozen=True)
class EstimationResult:
    m_hat: np.ndarray              # N x Q, real
    normalized_mse: float
    squared_error_j: float = None  # residual of the LS fit, henries^2


def coupling_feedthrough_matrix(scenario: Scenario) -> np.ndarray:
    """Diag of TX resistances plus j*w*(TX-TX mutuals): the known TX-side part."""
    f = 1j * scenario.omega * scenario.mutual_tx_tx
    f[np.diag_indices(scenario.n_tx)] = scenario.tx_resistance
    return f


def training_voltages(scenario: Scenario, protocol: TrainingProtocol) -> np.ndarray:
    """The N x T matrix of applied source voltages."""
    n, t = scenario.n_tx, protocol.n_slots
    if protocol.mode == BLOCK_SINGLE_TX:
        if t % n != 0:
            raise ValueError(
                f"block training needs a multiple of {n} slots, got {t}")
        h = np.zeros((n, t), dtype=complex)
        h[np.arange(t) % n, np.arange(t)] = protocol.active_voltage
        return h
    rng = np.random.default_rng([int(protocol.seed), 0x7631])
    return (rng.standard_normal((n, t)) + 1j * rng.standard_normal((n, t))) / math.sqrt(2)


def _single_tx_currents(scenario, protocol):
    """Block-mode TX currents when every idle TX loop is open.

    The active TX sees only the reflected receiver impedances; its port
    equation collapses to ``v = (r_n + w^2 sum_q M_nq^2 / r_q) i_n``.
    """
    n, t = scenario.n_tx, protocol.n_slots
    w = scenario.omega
    refl = w ** 2 * np.sum(scenario.mutual_tx_rx ** 2 / scenario.rx_resistance[None, :],
                           axis=1)
    i_active = protocol.active_voltage / (scenario.tx_resistance + refl)
    y = np.zeros((n, t), dtype=complex)
    idx = np.arange(t) % n
    y[idx, np.arange(t)] = i_active[idx]
    return y


def simulate_training(scenario: Scenario, protocol: TrainingProtocol,
                      snr_db: float) -> TrainingRecord:
    """Run the training circuit over the T slots and add feedback noise.

    Driven modes solve the full N x N system ``v = conj(B) i`` (TX-TX
    coupling included); open-circuit block mode conducts only through the
    active TX and records the induced EMF at the idle ports.  The feedback
    noise variance is set from the mean received-current power of a
    noiseless dry run so that ``mean |i_rx|^2 / sigma^2`` equals the
    requested SNR.
    """
    model = build_impedance(scenario)
    b_conj = model.b_complex.conj()
    if not np.all(np.isfinite(b_conj)):
        raise ScenarioError("impedance matrix is not finite", field="scenario")
    f = coupling_feedthrough_matrix(scenario)
    if protocol.mode == BLOCK_SINGLE_TX and protocol.inactive_tx == OPEN_CIRCUIT:
        if protocol.n_slots % scenario.n_tx != 0:
            raise ValueError(f"block training needs a multiple of {scenario.n_tx} "
                             f"slots, got {protocol.n_slots}")
        y = _single_tx_currents(scenario, protocol)
        z = (1j * scenario.omega / scenario.rx_resistance)[:, None] * (model.m_vectors @ y)
        # port voltages consistent with the open loops: active ports read the
        # applied voltage, idle ports read the induced EMF
        h = f @ y - 1j * scenario.omega * (scenario.mutual_tx_rx @ z)
    else:
        h = training_voltages(scenario, protocol)
        try:
            y = np.linalg.solve(b_conj, h)
        except np.linalg.LinAlgError as exc:
            raise ScenarioError("circuit matrix is singular", field="scenario") from exc
        z = (1j * scenario.omega / scenario.rx_resistance)[:, None] * (model.m_vectors @ y)
    g = (1j / scenario.omega) * (h - f @ y)

    if math.isinf(snr_db):
        sigma2 = 0.0
    else:
        sigma2 = float(np.mean(np.abs(z) ** 2)) / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng([int(protocol.seed), 0x7632])
    noise = _cscg(rng, z.shape, sigma2)
    return TrainingRecord(scenario=scenario, h=h, y=y, z=z, z_tilde=z + noise,
                          f=f, g=g, sigma2=sigma2, snr_db=float(snr_db))


def _cscg(rng, shape, sigma2):
    if sigma2 == 0.0:
        return np.zeros(shape, dtype=complex)
    s = math.sqrt(sigma2 / 2.0)
    return s * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def training_slot_powers(record: TrainingRecord) -> np.ndarray:
    """Per-slot total power drawn from the sources (reported, not enforced)."""
    return 0.5 * np.real(np.sum(record.h * record.y.conj(), axis=0))


def _truncate_real(m, what, tol=1e-9):
    scale = max(float(np.max(np.abs(m))), 1e-300)
    if float(np.max(np.abs(m.imag))) > tol * scale:
        raise EstimationError(f"{what} has a non-negligible imaginary part")
    return np.ascontiguousarray(m.real)


def _normalized_mse(scenario, m_hat):
    m = scenario.mutual_tx_rx
    return float(np.sum((m - m_hat) ** 2) / np.sum(m ** 2))


def estimate_perfect(record: TrainingRecord) -> EstimationResult:
    """Invert the true receiver-current matrix; needs exactly T = Q slots."""
    q, t = record.z.shape
    if t != q:
        raise EstimationError(f"perfect estimation needs T = Q, got T={t}, Q={q}")
    if q == 0:
        raise EstimationError("no receivers to estimate")
    if np.linalg.cond(record.z) > _COND_LIMIT:
        raise EstimationError("receiver-current matrix is numerically singular")
    m_hat = _truncate_real(record.g @ np.linalg.inv(record.z), "perfect estimate")
    return EstimationResult(m_hat=m_hat,
                            normalized_mse=_normalized_mse(record.scenario, m_hat))


def ls_estimate_matrices(g, z_tilde):
    """Raw least-squares solution of ``G = M Z`` for real M, complex data.

    Minimizing ``||G - M Z||_F^2`` over real matrices gives
    ``M = (G Z^H + G* Z^T) (Z Z^H + Z* Z^T)^{-1}``; both factors are real
    up to roundoff by conjugate symmetry.
    """
    num = g @ z_tilde.conj().T + g.conj() @ z_tilde.T
    den = z_tilde @ z_tilde.conj().T + z_tilde.conj() @ z_tilde.T
    return num, den


def estimate_ls(record: TrainingRecord) -> EstimationResult:
    """Least-squares estimate from noisy feedback; real by construction."""
    q, t = record.z_tilde.shape
    if t < q:
        raise EstimationError(f"need at least Q={q} slots, got {t}")
    num, den = ls_estimate_matrices(record.g, record.z_tilde)
    if np.linalg.cond(den) > _COND_LIMIT:
        raise EstimationError("feedback Gram matrix is rank deficient")
    m_hat = np.linalg.solve(den.T, num.T).T
    m_hat = _truncate_real(m_hat, "least-squares estimate")
    resid = record.g - m_hat @ record.z_tilde
    j = float(np.real(np.sum(resid * resid.conj())))
    return EstimationResult(m_hat=m_hat,
                            normalized_mse=_normalized_mse(record.scenario, m_hat),
                            squared_error_j=j)


def pairwise_circuit(scenario: Scenario):
    """Isolated two-coil responses for every (TX, RX) pair at unit drive.

    With only TX n and RX q switched on, the TX current is
    ``v / (r_n + w^2 M_nq^2 / r_q)`` and the RX current follows from the
    single-coil coupling; returns (i_tx, i_rx) arrays of shape (N, Q).
    """
    w = scenario.omega
    m = scenario.mutual_tx_rx
    denom = scenario.tx_resistance[:, None] + w ** 2 * m ** 2 / scenario.rx_resistance[None, :]
    i_tx = 1.0 / denom
    i_rx = (1j * w * m / scenario.rx_resistance[None, :]) * i_tx
    return i_tx, i_rx


def estimate_pairwise_benchmark(scenario: Scenario, snr_db: float, seed: int = 0,
                                active_voltage: float = 0.75) -> EstimationResult:
    """One-pair-at-a-time benchmark: N*Q slots, one estimate per slot."""
    v = active_voltage
    i_tx, i_rx = pairwise_circuit(scenario)
    i_tx, i_rx = v * i_tx, v * i_rx
    if math.isinf(snr_db):
        sigma2 = 0.0
    else:
        sigma2 = float(np.mean(np.abs(i_rx) ** 2)) / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng([int(seed), 0x7633])
    noisy = i_rx + _cscg(rng, i_rx.shape, sigma2)
    with np.errstate(divide="ignore", invalid="ignore"):
        m_hat = np.real((scenario.tx_resistance[:, None] * i_tx - v)
                        / (1j * scenario.omega * noisy))
    m_hat = np.where(np.isfinite(m_hat), m_hat, 0.0)
    return EstimationResult(m_hat=m_hat,
                            normalized_mse=_normalized_mse(scenario, m_hat))


@dataclass(frozen=True)
class MseRow:
    snr_db: float
    mse: float
    stderr: float
    trials: int
    estimator: str
    n_slots: int


def _ls_mse_batch(record, sigma2, rng, trials):
    z_t = record.z[None, :, :] + _cscg(rng, (trials,) + record.z.shape, sigma2)
    num = 2.0 * np.real(np.einsum("nt,cqt->cnq", record.g, z_t.conj()))
    den = 2.0 * np.real(np.einsum("cqt,cpt->cqp", z_t, z_t.conj()))
    m_hat = np.linalg.solve(den, num.transpose(0, 2, 1)).transpose(0, 2, 1)
    err = m_hat - record.scenario.mutual_tx_rx[None, :, :]
    return np.sum(err ** 2, axis=(1, 2))


def _pairwise_mse_batch(scenario, i_tx, i_rx, v, sigma2, rng, trials):
    noisy = i_rx[None] + _cscg(rng, (trials,) + i_rx.shape, sigma2)
    with np.errstate(divide="ignore", invalid="ignore"):
        m_hat = np.real((scenario.tx_resistance[None, :, None] * i_tx[None] - v)
                        / (1j * scenario.omega * noisy))
    m_hat = np.where(np.isfinite(m_hat), m_hat, 0.0)
    err = m_hat - scenario.mutual_tx_rx[None, :, :]
    return np.sum(err ** 2, axis=(1, 2))


def monte_carlo_mse(scenario: Scenario, estimator: str, protocol: TrainingProtocol,
                    snr_db_list, trials: int = 100_000, seed: int = 0):
    """Normalized-MSE table over SNR points, averaged over noise draws.

    Noise is drawn in deterministically keyed chunks of (seed, SNR index,
    chunk index) so results are reproducible and independent of chunking.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if estimator not in ("ls", "perfect", "pairwise"):
        raise ValueError(f"unknown estimator {estimator!r}")
    m_norm2 = float(np.sum(scenario.mutual_tx_rx ** 2))
    rows = []
    for snr_idx, snr_db in enumerate(snr_db_list):
        if estimator == "perfect":
            proto = TrainingProtocol(mode=RANDOM_VOLTAGE, n_slots=scenario.n_rx,
                                     seed=protocol.seed)
            res = estimate_perfect(simulate_training(scenario, proto, snr_db))
            rows.append(MseRow(float(snr_db), res.normalized_mse, 0.0, trials,
                               estimator, proto.n_slots))
            continue

        if estimator == "ls":
            record = simulate_training(scenario, protocol, snr_db)
            sigma2 = record.sigma2
            n_slots = protocol.n_slots
        else:
            i_tx, i_rx = pairwise_circuit(scenario)
            v = 0.75
            i_tx, i_rx = v * i_tx, v * i_rx
            sigma2 = 0.0 if math.isinf(snr_db) else \
                float(np.mean(np.abs(i_rx) ** 2)) / 10.0 ** (snr_db / 10.0)
            n_slots = scenario.n_tx * scenario.n_rx

        sq_errors = np.empty(trials)
        done = 0
        chunk_idx = 0
        while done < trials:
            count = min(_CHUNK, trials - done)
            rng = np.random.default_rng([int(seed), snr_idx, chunk_idx])
            if estimator == "ls":
                sq = _ls_mse_batch(record, sigma2, rng, count)
            else:
                sq = _pairwise_mse_batch(scenario, i_tx, i_rx, v, sigma2, rng, count)
            sq_errors[done:done + count] = sq
            done += count
            chunk_idx += 1
        mse = sq_errors / m_norm2
        rows.append(MseRow(float(snr_db), float(mse.mean()),
                           float(mse.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
                           trials, estimator, n_slots))
    return rows


def protocol_to_dict(protocol: TrainingProtocol) -> dict:
    return {"mode": protocol.mode, "n_slots": protocol.n_slots,
            "active_voltage": protocol.active_voltage, "seed": protocol.seed,
            "inactive_tx": protocol.inactive_tx}


def protocol_from_dict(doc: dict) -> TrainingProtocol:
    return TrainingProtocol(**{k: doc[k] for k in
                               ("mode", "n_slots", "active_voltage", "seed",
                                "inactive_tx") if k in doc})


def write_mse_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["snr_db", "mse", "stderr", "trials", "estimator", "n_slots"])
        for r in rows:
            writer.writerow([r.snr_db, repr(r.mse), repr(r.stderr),
                             r.trials, r.estimator, r.n_slots])
