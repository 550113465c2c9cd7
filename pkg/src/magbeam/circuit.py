"""Phasor-domain circuit model of a multi-coil resonant WPT link.

N single-coil transmitters drive Q single-coil receivers, all tuned to the
same angular frequency ``omega`` so every self-reactance cancels.  With the
TX current phasor vector ``i`` as the free variable, the whole circuit is
captured by a complex symmetric impedance matrix ``B = Bbar + j*Bhat``:

* each receiver current is a linear map of ``i``,
* each TX source voltage is ``v_n = b_n^H i`` with ``b_n`` the n-th column
  of ``B`` (equivalently ``v = conj(B) i``),
* the total power drawn from the sources is ``0.5 * i^H Bbar i`` and does
  not involve the TX-TX mutual inductances.

All quantities are SI; voltage/current magnitudes are peak phasor
amplitudes (hence the 1/2 factors in every power expression).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import EfficiencyUndefinedError, ScenarioError

LOAD_ONLY = "load_only"
TOTAL_RX_RESISTANCE = "total_rx_resistance"
_ACCOUNTING_MODES = (LOAD_ONLY, TOTAL_RX_RESISTANCE)

_SYM_TOL = 1e-9


def _readonly(a, dtype=float):
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Scenario:
    """Full electrical description of one TX/RX deployment.

    ``mutual_tx_rx`` is N x Q (henries), ``mutual_tx_tx`` is N x N symmetric
    with zero diagonal.  ``load_accounting`` selects whether delivered power
    is booked against the load resistance only (matches the bundled
    reference figures) or the
    total receiver resistance.
    """

    n_tx: int
    n_rx: int
    omega: float
    tx_resistance: np.ndarray
    rx_parasitic: np.ndarray
    rx_load: np.ndarray
    mutual_tx_rx: np.ndarray
    mutual_tx_tx: np.ndarray
    total_power_cap: float
    peak_voltage: np.ndarray
    peak_current: np.ndarray
    load_accounting: str = LOAD_ONLY
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n, q = int(self.n_tx), int(self.n_rx)
        if n < 1:
            raise ScenarioError("need at least one TX", field="n_tx")
        if q < 0:
            raise ScenarioError("receiver count cannot be negative", field="n_rx")
        object.__setattr__(self, "n_tx", n)
        object.__setattr__(self, "n_rx", q)
        object.__setattr__(self, "tx_resistance", _readonly(self.tx_resistance))
        object.__setattr__(self, "rx_parasitic", _readonly(self.rx_parasitic))
        object.__setattr__(self, "rx_load", _readonly(self.rx_load))
        object.__setattr__(self, "mutual_tx_rx",
                           _readonly(np.reshape(self.mutual_tx_rx, (n, q))))
        object.__setattr__(self, "mutual_tx_tx", _readonly(self.mutual_tx_tx))
        object.__setattr__(self, "peak_voltage", _readonly(self.peak_voltage))
        object.__setattr__(self, "peak_current", _readonly(self.peak_current))
        self._validate()

    def _validate(self):
        n, q = self.n_tx, self.n_rx
        checks = [
            ("tx_resistance", self.tx_resistance, (n,)),
            ("rx_parasitic", self.rx_parasitic, (q,)),
            ("rx_load", self.rx_load, (q,)),
            ("mutual_tx_rx", self.mutual_tx_rx, (n, q)),
            ("mutual_tx_tx", self.mutual_tx_tx, (n, n)),
            ("peak_voltage", self.peak_voltage, (n,)),
            ("peak_current", self.peak_current, (n,)),
        ]
        for name, arr, shape in checks:
            if arr.shape != shape:
                raise ScenarioError(f"expected shape {shape}, got {arr.shape}", field=name)
            if not np.all(np.isfinite(arr)):
                raise ScenarioError("entries must be finite", field=name)
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise ScenarioError("angular frequency must be positive", field="omega")
        for name, arr in [("tx_resistance", self.tx_resistance),
                          ("rx_parasitic", self.rx_parasitic),
                          ("rx_load", self.rx_load),
                          ("peak_voltage", self.peak_voltage),
                          ("peak_current", self.peak_current)]:
            if arr.size and np.min(arr) <= 0:
                raise ScenarioError("entries must be strictly positive", field=name)
        if not (np.isfinite(self.total_power_cap) and self.total_power_cap > 0):
            raise ScenarioError("must be positive", field="total_power_cap")
        mt = self.mutual_tx_tx
        scale = max(1.0, float(np.max(np.abs(mt))) if mt.size else 1.0)
        if np.max(np.abs(mt - mt.T)) > _SYM_TOL * scale:
            raise ScenarioError("must be symmetric (coil reciprocity)", field="mutual_tx_tx")
        if np.max(np.abs(np.diag(mt))) > _SYM_TOL * scale:
            raise ScenarioError("diagonal must be zero", field="mutual_tx_tx")
        if self.load_accounting not in _ACCOUNTING_MODES:
            raise ScenarioError(f"unknown mode {self.load_accounting!r}",
                                field="load_accounting")
        # peak limits must be able to out-supply the total power cap, else the
        # total-power constraint could never become active
        if 0.5 * float(self.peak_voltage @ self.peak_current) <= self.total_power_cap:
            raise ScenarioError(
                "sum of 0.5*V_n*A_n must exceed total_power_cap", field="total_power_cap")

    @property
    def rx_resistance(self):
        """Total per-RX resistance (parasitic + load), ohms."""
        return self.rx_parasitic + self.rx_load

    @property
    def rx_power_factor(self):
        """Fraction of the coil dissipation booked as delivered power."""
        if self.load_accounting == LOAD_ONLY:
            return self.rx_load / self.rx_resistance
        return np.ones(self.n_rx)


@dataclass(frozen=True)
class ImpedanceModel:
    """Matrices derived from a scenario, shared by every optimization.

    ``b_bar``/``b_hat`` are the real/imaginary parts of the impedance matrix,
    ``b_columns[n]`` its n-th column, ``rank_one_tx[n] = b_n b_n^H`` and
    ``rank_one_rx[q] = m_q m_q^T`` the rank-one forms entering the voltage
    and delivered-power quadratics.
    """

    b_bar: np.ndarray
    b_hat: np.ndarray
    b_columns: np.ndarray
    rank_one_tx: np.ndarray
    rank_one_rx: np.ndarray
    m_vectors: np.ndarray

    @property
    def n_tx(self):
        return self.b_bar.shape[0]

    @property
    def n_rx(self):
        return self.m_vectors.shape[0]

    @property
    def b_complex(self):
        return self.b_bar + 1j * self.b_hat


@dataclass(frozen=True)
class Excitation:
    """One TX current phasor vector (amperes)."""

    currents: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.array(self.currents, dtype=complex))
        if arr.ndim != 1 or not np.all(np.isfinite(arr)):
            raise ValueError("currents must be a finite 1-D complex vector")
        arr.setflags(write=False)
        object.__setattr__(self, "currents", arr)

    @property
    def n_tx(self):
        return self.currents.size


def build_impedance(scenario: Scenario) -> ImpedanceModel:
    """Assemble the impedance matrices for a scenario."""
    mt = np.asarray(scenario.mutual_tx_tx, dtype=float)
    if not np.all(np.isfinite(mt)) or not np.all(np.isfinite(scenario.mutual_tx_rx)):
        raise ScenarioError("inductances must be finite", field="mutual_tx_tx")
    scale = max(1.0, float(np.max(np.abs(mt))) if mt.size else 1.0)
    if np.max(np.abs(mt - mt.T)) > _SYM_TOL * scale:
        raise ScenarioError("must be symmetric", field="mutual_tx_tx")

    w = scenario.omega
    n, q = scenario.n_tx, scenario.n_rx
    m_vectors = scenario.mutual_tx_rx.T.copy()              # (Q, N)
    rank_one_rx = np.einsum("qi,qj->qij", m_vectors, m_vectors)
    b_bar = np.diag(scenario.tx_resistance).astype(float)
    for k in range(q):
        b_bar += (w ** 2 / scenario.rx_resistance[k]) * rank_one_rx[k]
    b_hat = -w * mt
    np.fill_diagonal(b_hat, 0.0)

    b = b_bar + 1j * b_hat
    b_columns = b.T.copy()                                  # row n = column b_n
    rank_one_tx = np.einsum("ni,nj->nij", b_columns, b_columns.conj())
    for arr in (b_bar, b_hat, b_columns, rank_one_tx, rank_one_rx, m_vectors):
        arr.setflags(write=False)
    return ImpedanceModel(b_bar=b_bar, b_hat=b_hat, b_columns=b_columns,
                          rank_one_tx=rank_one_tx, rank_one_rx=rank_one_rx,
                          m_vectors=m_vectors)


def _check_dims(model: ImpedanceModel, exc: Excitation):
    if exc.n_tx != model.n_tx:
        raise ValueError(f"excitation has {exc.n_tx} entries, model expects {model.n_tx}")


def rx_currents(scenario: Scenario, model: ImpedanceModel, exc: Excitation) -> np.ndarray:
    """Receiver current phasors induced by a TX excitation."""
    _check_dims(model, exc)
    return (1j * scenario.omega / scenario.rx_resistance) * (model.m_vectors @ exc.currents)


def delivered_power(scenario: Scenario, model: ImpedanceModel, exc: Excitation, q: int) -> float:
    """Power delivered to receiver ``q`` under the scenario's accounting mode."""
    _check_dims(model, exc)
    if not 0 <= q < scenario.n_rx:
        raise IndexError(f"receiver index {q} out of range for Q={scenario.n_rx}")
    i = exc.currents
    quad = np.real(np.vdot(i, model.rank_one_rx[q] @ i))
    p = scenario.omega ** 2 / (2.0 * scenario.rx_resistance[q]) * quad
    return float(p * scenario.rx_power_factor[q])


def delivered_powers(scenario: Scenario, model: ImpedanceModel, exc: Excitation) -> np.ndarray:
    """Vector of delivered powers for all receivers."""
    _check_dims(model, exc)
    proj = model.m_vectors @ exc.currents
    p = scenario.omega ** 2 / (2.0 * scenario.rx_resistance) * np.abs(proj) ** 2
    return p * scenario.rx_power_factor


def tx_voltages(model: ImpedanceModel, exc: Excitation) -> np.ndarray:
    """Source voltage phasors, ``v_n = b_n^H i``."""
    _check_dims(model, exc)
    return model.b_columns.conj() @ exc.currents


def tx_total_power(model: ImpedanceModel, exc: Excitation) -> float:
    """Total power drawn from all TX sources, ``0.5 i^H Bbar i``."""
    _check_dims(model, exc)
    i = exc.currents
    return float(np.real(np.vdot(i, model.b_bar @ i))) / 2.0


def efficiency(scenario: Scenario, model: ImpedanceModel, schedule) -> float:
    """Delivered-to-drawn power ratio of a (possibly time-shared) schedule.

    ``schedule`` is a list of ``(Excitation, time_fraction)`` pairs whose
    fractions are nonnegative and sum to one.
    """
    fracs = np.array([tau for _, tau in schedule], dtype=float)
    if fracs.size == 0 or np.min(fracs) < -1e-12 or abs(fracs.sum() - 1.0) > 1e-9:
        raise ValueError("time fractions must be nonnegative and sum to 1")
    p_out = sum(tau * float(np.sum(delivered_powers(scenario, model, exc)))
                for exc, tau in schedule)
    p_in = sum(tau * tx_total_power(model, exc) for exc, tau in schedule)
    if p_in <= 0.0:
        raise EfficiencyUndefinedError("schedule draws zero transmit power")
    return p_out / p_in


@dataclass(frozen=True)
class SlackReport:
    """Signed distances to each constraint; feasible iff all are >= -tol."""

    voltage_slack: np.ndarray
    current_slack: np.ndarray
    total_power_slack: float

    @property
    def min_slack(self):
        vals = [self.total_power_slack]
        if self.voltage_slack.size:
            vals.append(float(np.min(self.voltage_slack)))
            vals.append(float(np.min(self.current_slack)))
        return min(vals)

    def feasible(self, tol=1e-6):
        return self.min_slack >= -tol


def constraint_slacks(scenario: Scenario, model: ImpedanceModel, exc: Excitation) -> SlackReport:
    """Per-constraint slack of an excitation against the scenario limits."""
    v = tx_voltages(model, exc)
    return SlackReport(
        voltage_slack=scenario.peak_voltage - np.abs(v),
        current_slack=scenario.peak_current - np.abs(exc.currents),
        total_power_slack=scenario.total_power_cap - tx_total_power(model, exc),
    )
