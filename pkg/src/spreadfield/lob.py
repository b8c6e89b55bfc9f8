"""Order-book ingestion and model calibration.

Reads quote samples and executed volumes, aggregates them per asset, and
produces every calibrated input of the simulation: average and log spreads,
log mid-price ball centers, initial radii, and the liquidity coefficients
(raw scale ``alpha_in`` and log scale ``alpha``).

All functions are pure over immutable inputs and safe to call concurrently.

Note on volumes: the ``shares`` column is treated as the combined executed
sell-and-buy total per asset; sources that report sell-only totals should be
summed upstream.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_RHO_MAX = 0.1
DEFAULT_CS_SAFETY = 10.0


class IngestError(ValueError):
    """Malformed order-book input (carries a line number when parsing files)."""


@dataclass(frozen=True)
class QuoteSample:
    """One timestamped ask/bid observation for one asset in one market."""

    market_id: int
    asset_id: int
    time: float  # minutes since the first sample of the stream
    ask: float
    bid: float

    def __post_init__(self):
        if self.market_id < 1 or self.asset_id < 1:
            raise IngestError("market and asset ids must be >= 1")
        if not (self.ask > self.bid > 0.0):
            raise IngestError(
                f"need ask > bid > 0, got ask={self.ask}, bid={self.bid}")


@dataclass(frozen=True)
class ExecutedVolume:
    """Total executed shares for one (market, asset) over the sample window."""

    market_id: int
    asset_id: int
    shares: float

    def __post_init__(self):
        if self.shares < 0.0:
            raise IngestError("shares must be nonnegative")


@dataclass(frozen=True)
class AssetAggregate:
    """Per-asset sums and derived calibration quantities."""

    asset_id: int
    m: int
    sum_ask: float
    sum_bid: float
    avg_spread: float    # mean of per-quote spreads
    log_spread: float    # ln(sum ask) - ln(sum bid)
    center_coord: float  # ln of the average mid price
    volume: float
    liquidity: float     # volume / avg_spread, raw price scale


@dataclass(frozen=True)
class ScalingReport:
    """Mean-field validity check: rho = I * max R(0) / alpha**(4/9)."""

    rho: float
    rho_max: float
    passed: bool


@dataclass(frozen=True, eq=False)
class MarketParams:
    """Calibrated simulation inputs.

    ``centers`` has one row per ball (market) holding the log mid-price
    coordinates of the n assets; ``radii0`` holds the initial radii, half
    the minimum log spread of each market.
    """

    n: int
    n_balls: int
    alpha: float
    alpha_in: float
    centers: np.ndarray  # (n_balls, n)
    radii0: np.ndarray   # (n_balls,)
    v_inf0: float
    c0: float
    cs: float

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise IngestError("alpha must be positive")
        if self.v_inf0 <= 0.0:
            raise IngestError("v_inf0 must be positive")
        if np.any(self.radii0 <= 0.0):
            raise IngestError("all initial radii must be positive")
        if self.centers.shape != (self.n_balls, self.n):
            raise IngestError("centers must have shape (n_balls, n)")

    @property
    def omega_volume(self) -> float:
        return self.cs ** 3

    @classmethod
    def synthetic(cls, radii, alpha, centers=None, c0=1.0, cs=None,
                  v_inf0=None) -> "MarketParams":
        """Build params directly from radii and alpha for experiments.

        Centers default to well-separated points on the first axis (spacing
        1000x the largest radius); cs defaults to the standard rule.
        """
        radii = np.asarray(radii, dtype=float)
        k = len(radii)
        if centers is None:
            spacing = 1e3 * float(radii.max())
            centers = np.zeros((k, 3))
            centers[:, 0] = spacing * np.arange(k)
        centers = np.asarray(centers, dtype=float)
        if cs is None:
            cs = default_cs(alpha, centers)
        if v_inf0 is None:
            v_inf0 = k / float(radii.sum())
        return cls(n=centers.shape[1], n_balls=k, alpha=float(alpha),
                   alpha_in=float(alpha), centers=centers, radii0=radii,
                   v_inf0=float(v_inf0), c0=float(c0), cs=float(cs))


def cs_matching_alpha(alpha: float) -> float:
    """Domain scale for which cs**3 equals alpha**(4/3)."""
    return alpha ** (4.0 / 9.0)


def default_cs(alpha: float, centers: np.ndarray) -> float:
    """Default domain-scale rule: 10 * max(alpha**(4/9), largest center norm).

    Keeps the price vectors inside the background domain while cs >> 1.
    """
    center_norm = 0.0
    if centers.size:
        center_norm = float(np.max(np.linalg.norm(centers, axis=1)))
    return DEFAULT_CS_SAFETY * max(cs_matching_alpha(alpha), center_norm)


def mid_price(ask: float, bid: float) -> float:
    """Midpoint of the ask and bid prices."""
    if not (ask > bid > 0.0):
        raise IngestError(f"need ask > bid > 0, got ask={ask}, bid={bid}")
    return (ask + bid) / 2.0


def spread(ask: float, bid: float) -> float:
    """Ask price minus bid price."""
    if not (ask > bid > 0.0):
        raise IngestError(f"need ask > bid > 0, got ask={ask}, bid={bid}")
    return ask - bid


def aggregate_asset(samples: Sequence[QuoteSample],
                    volume: ExecutedVolume) -> AssetAggregate:
    """Aggregate one (market, asset) quote stream into calibration sums."""
    if not samples:
        raise IngestError("no samples for asset")
    first = samples[0]
    if volume is None:
        raise IngestError(
            f"missing volume record for market {first.market_id} "
            f"asset {first.asset_id}")
    if (volume.market_id, volume.asset_id) != (first.market_id, first.asset_id):
        raise IngestError("volume record does not match the quote stream")
    prev_t = None
    sum_ask = 0.0
    sum_bid = 0.0
    sum_spread = 0.0
    for s in samples:
        if (s.market_id, s.asset_id) != (first.market_id, first.asset_id):
            raise IngestError("mixed (market, asset) ids in one stream")
        if prev_t is not None and s.time <= prev_t:
            raise IngestError(
                f"timestamps must strictly increase (market {s.market_id}, "
                f"asset {s.asset_id}, t={s.time})")
        prev_t = s.time
        sum_ask += s.ask
        sum_bid += s.bid
        sum_spread += s.ask - s.bid
    m = len(samples)
    avg_spread = sum_spread / m
    log_spread = math.log(sum_ask) - math.log(sum_bid)
    center_coord = math.log((sum_ask + sum_bid) / (2.0 * m))
    liquidity = volume.shares / avg_spread
    return AssetAggregate(asset_id=first.asset_id, m=m, sum_ask=sum_ask,
                          sum_bid=sum_bid, avg_spread=avg_spread,
                          log_spread=log_spread, center_coord=center_coord,
                          volume=volume.shares, liquidity=liquidity)


def liquidity_alpha(aggregates: Sequence[AssetAggregate]) -> tuple[float, float]:
    """Volume-weighted liquidity coefficients (raw scale, log scale)."""
    w_tot = sum(a.volume for a in aggregates)
    if w_tot <= 0.0:
        raise IngestError("total executed volume is zero")
    alpha_in = 0.0
    alpha = 0.0
    for a in aggregates:
        if a.avg_spread <= 0.0 or a.log_spread <= 0.0:
            raise IngestError(f"asset {a.asset_id} has a zero spread")
        alpha_in += a.volume ** 2 / (a.avg_spread * w_tot)
        alpha += a.volume ** 2 / (a.log_spread * w_tot)
    return alpha_in, alpha


def build_params(market_aggregates: Mapping[int, Sequence[AssetAggregate]],
                 c0: float = 1.0, cs: float | None = None) -> MarketParams:
    """Assemble MarketParams from per-market asset aggregates.

    With several markets, alpha (and alpha_in) is the plain average of the
    per-market coefficients; the initial mean field is
    v_inf0 = n_balls / sum of initial radii.
    """
    if not market_aggregates:
        raise IngestError("no markets")
    market_ids = sorted(market_aggregates)
    asset_ids = None
    centers = []
    radii0 = []
    alphas_in = []
    alphas = []
    for mid in market_ids:
        aggs = sorted(market_aggregates[mid], key=lambda a: a.asset_id)
        ids = tuple(a.asset_id for a in aggs)
        if asset_ids is None:
            asset_ids = ids
        elif ids != asset_ids:
            raise IngestError(
                f"market {mid} has asset set {ids}, expected {asset_ids}")
        centers.append([a.center_coord for a in aggs])
        radii0.append(min(a.log_spread for a in aggs) / 2.0)
        a_in, a_log = liquidity_alpha(aggs)
        alphas_in.append(a_in)
        alphas.append(a_log)
    n_balls = len(market_ids)
    n = len(asset_ids)
    alpha = sum(alphas) / n_balls
    alpha_in = sum(alphas_in) / n_balls
    centers = np.asarray(centers, dtype=float)
    radii0 = np.asarray(radii0, dtype=float)
    if cs is None:
        cs = default_cs(alpha, centers)
    return MarketParams(n=n, n_balls=n_balls, alpha=alpha, alpha_in=alpha_in,
                        centers=centers, radii0=radii0,
                        v_inf0=n_balls / float(radii0.sum()),
                        c0=float(c0), cs=float(cs))


def check_scaling(params: MarketParams,
                  rho_max: float = DEFAULT_RHO_MAX) -> ScalingReport:
    """Report-only check that the initial radii are small on the alpha scale."""
    rho = params.n_balls * float(params.radii0.max()) / params.alpha ** (4.0 / 9.0)
    return ScalingReport(rho=rho, rho_max=rho_max, passed=rho <= rho_max)


# ---------------------------------------------------------------------------
# File interfaces
# ---------------------------------------------------------------------------

_QUOTES_HEADER = ["market", "asset", "time", "ask", "bid"]
_VOLUMES_HEADER = ["market", "asset", "shares"]


def _parse_time(text: str, lineno: int) -> float:
    """Parse `HH:MM` clock times or plain minute counts into minutes."""
    text = text.strip()
    if ":" in text:
        hh, _, mm = text.partition(":")
        try:
            return int(hh) * 60.0 + int(mm)
        except ValueError:
            raise IngestError(f"line {lineno}: bad time {text!r}") from None
    try:
        return float(text)
    except ValueError:
        raise IngestError(f"line {lineno}: bad time {text!r}") from None


def _check_header(row, expected, path):
    got = [c.strip().lower() for c in row]
    if got != expected:
        raise IngestError(
            f"{path}: expected header {','.join(expected)!r}, "
            f"got {','.join(got)!r}")


def read_quotes_csv(path) -> dict[tuple[int, int], list[QuoteSample]]:
    """Read a quotes CSV into per-(market, asset) streams in file order.

    Times are rebased to minutes since the first sample of each stream.
    """
    streams: dict[tuple[int, int], list[QuoteSample]] = {}
    raw: dict[tuple[int, int], list[tuple[float, float, float, int]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        _check_header(header, _QUOTES_HEADER, path)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 5:
                raise IngestError(f"line {lineno}: expected 5 fields, got {len(row)}")
            try:
                market = int(row[0])
                asset = int(row[1])
                ask = float(row[3])
                bid = float(row[4])
            except ValueError as exc:
                raise IngestError(f"line {lineno}: {exc}") from None
            t = _parse_time(row[2], lineno)
            raw.setdefault((market, asset), []).append((t, ask, bid, lineno))
    if not raw:
        raise IngestError(f"{path}: no samples")
    for key, rows in raw.items():
        t0 = rows[0][0]
        out = []
        for t, ask, bid, lineno in rows:
            try:
                out.append(QuoteSample(market_id=key[0], asset_id=key[1],
                                       time=t - t0, ask=ask, bid=bid))
            except IngestError as exc:
                raise IngestError(f"line {lineno}: {exc}") from None
        streams[key] = out
    return streams


def read_volumes_csv(path) -> dict[tuple[int, int], ExecutedVolume]:
    """Read a volumes CSV; exactly one record per (market, asset)."""
    volumes: dict[tuple[int, int], ExecutedVolume] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        _check_header(header, _VOLUMES_HEADER, path)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise IngestError(f"line {lineno}: expected 3 fields, got {len(row)}")
            try:
                key = (int(row[0]), int(row[1]))
                vol = ExecutedVolume(market_id=key[0], asset_id=key[1],
                                     shares=float(row[2]))
            except IngestError as exc:
                raise IngestError(f"line {lineno}: {exc}") from None
            except ValueError as exc:
                raise IngestError(f"line {lineno}: {exc}") from None
            if key in volumes:
                raise IngestError(f"line {lineno}: duplicate volume record for {key}")
            volumes[key] = vol
    return volumes


def ingest(quotes_path, volumes_path, c0: float = 1.0,
           cs: float | None = None) -> MarketParams:
    """Full pipeline: CSV files to calibrated MarketParams."""
    streams = read_quotes_csv(quotes_path)
    volumes = read_volumes_csv(volumes_path)
    markets: dict[int, list[AssetAggregate]] = {}
    for (market, asset), samples in sorted(streams.items()):
        vol = volumes.get((market, asset))
        if vol is None:
            raise IngestError(f"missing volume record for market {market}, "
                              f"asset {asset}")
        markets.setdefault(market, []).append(aggregate_asset(samples, vol))
    return build_params(markets, c0=c0, cs=cs)


def write_params(params: MarketParams, path) -> None:
    """Write a params file (line-oriented key=value, 17 significant digits)."""
    lines = [
        f"n={params.n}",
        f"I={params.n_balls}",
        f"alpha={params.alpha:.17g}",
        f"alpha_in={params.alpha_in:.17g}",
        f"v_inf0={params.v_inf0:.17g}",
        f"c0={params.c0:.17g}",
        f"cs={params.cs:.17g}",
    ]
    for i in range(params.n_balls):
        coords = ",".join(f"{x:.17g}" for x in params.centers[i])
        lines.append(f"center.{i + 1}={coords}")
    for i in range(params.n_balls):
        lines.append(f"radius0.{i + 1}={params.radii0[i]:.17g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_params(path) -> MarketParams:
    """Read a params file written by `write_params`."""
    kv: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise IngestError(f"{path} line {lineno}: expected key=value")
            key, _, value = line.partition("=")
            kv[key.strip()] = value.strip()
    try:
        n = int(kv["n"])
        n_balls = int(kv["I"])
        centers = np.array([
            [float(x) for x in kv[f"center.{i + 1}"].split(",")]
            for i in range(n_balls)])
        radii0 = np.array([float(kv[f"radius0.{i + 1}"])
                           for i in range(n_balls)])
        return MarketParams(n=n, n_balls=n_balls, alpha=float(kv["alpha"]),
                            alpha_in=float(kv["alpha_in"]), centers=centers,
                            radii0=radii0, v_inf0=float(kv["v_inf0"]),
                            c0=float(kv["c0"]), cs=float(kv["cs"]))
    except KeyError as exc:
        raise IngestError(f"{path}: missing key {exc}") from None
