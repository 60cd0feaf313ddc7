"""Seeded generator of CICIDS2017-schema flow records.

Each flow is simulated packet by packet (direction, payload size, header size,
arrival time, TCP flags) from a traffic profile, and the 78 flow features are
then derived from the packet list the way CICFlowMeter derives them. Zero
duration flows produce the ``Infinity``/``NaN`` rate cells that the real
dataset is known for.

This is a stand-in for the real CICIDS2017 CSVs, which are not redistributed
with the package. Profiles overlap on purpose (benign HTTP vs. DoS, benign SSH
vs. brute force) so the classes are not trivially separable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FEATURES = [
    "Destination Port", "Flow Duration", "Total Fwd Packets", "Total Backward Packets",
    "Total Length of Fwd Packets", "Total Length of Bwd Packets",
    "Fwd Packet Length Max", "Fwd Packet Length Min", "Fwd Packet Length Mean", "Fwd Packet Length Std",
    "Bwd Packet Length Max", "Bwd Packet Length Min", "Bwd Packet Length Mean", "Bwd Packet Length Std",
    "Flow Bytes/s", "Flow Packets/s",
    "Flow IAT Mean", "Flow IAT Std", "Flow IAT Max", "Flow IAT Min",
    "Fwd IAT Total", "Fwd IAT Mean", "Fwd IAT Std", "Fwd IAT Max", "Fwd IAT Min",
    "Bwd IAT Total", "Bwd IAT Mean", "Bwd IAT Std", "Bwd IAT Max", "Bwd IAT Min",
    "Fwd PSH Flags", "Bwd PSH Flags", "Fwd URG Flags", "Bwd URG Flags",
    "Fwd Header Length", "Bwd Header Length", "Fwd Packets/s", "Bwd Packets/s",
    "Min Packet Length", "Max Packet Length", "Packet Length Mean", "Packet Length Std",
    "Packet Length Variance",
    "FIN Flag Count", "SYN Flag Count", "RST Flag Count", "PSH Flag Count", "ACK Flag Count",
    "URG Flag Count", "CWE Flag Count", "ECE Flag Count",
    "Down/Up Ratio", "Average Packet Size", "Avg Fwd Segment Size", "Avg Bwd Segment Size",
    "Fwd Header Length.1",
    "Fwd Avg Bytes/Bulk", "Fwd Avg Packets/Bulk", "Fwd Avg Bulk Rate",
    "Bwd Avg Bytes/Bulk", "Bwd Avg Packets/Bulk", "Bwd Avg Bulk Rate",
    "Subflow Fwd Packets", "Subflow Fwd Bytes", "Subflow Bwd Packets", "Subflow Bwd Bytes",
    "Init_Win_bytes_forward", "Init_Win_bytes_backward", "act_data_pkt_fwd", "min_seg_size_forward",
    "Active Mean", "Active Std", "Active Max", "Active Min",
    "Idle Mean", "Idle Std", "Idle Max", "Idle Min",
]
LABEL = "Label"
IDLE_THRESHOLD_US = 5_000_000.0

FIN, SYN, RST, PSH, ACK, URG, CWE, ECE = (1 << i for i in range(8))


@dataclass(frozen=True)
class Profile:
    label: str
    ports: tuple[int, ...]
    fwd_packets: tuple[float, float]   # lognormal (median, sigma)
    bwd_ratio: tuple[float, float]     # uniform range of n_bwd / n_fwd
    fwd_payload: tuple[float, float]   # lognormal (median, sigma), clipped to MSS
    bwd_payload: tuple[float, float]
    iat_us: tuple[float, float]        # lognormal (median, sigma)
    idle_prob: float = 0.0             # chance that a gap becomes an idle period
    idle_us: tuple[float, float] = (2e7, 0.5)
    tcp: bool = True
    zero_payload_prob: float = 0.3
    windows: tuple[int, ...] = (8192, 29200, 65535, 256, 229)
    flags: int = ACK | PSH


BENIGN = "BENIGN"
PROFILES: dict[str, list[tuple[float, Profile]]] = {
    "benign": [
        (0.40, Profile(BENIGN, (443,), (10, 0.9), (0.8, 1.6), (250, 1.0), (900, 0.6), (2e4, 1.8), 0.05)),
        (0.20, Profile(BENIGN, (53,), (1, 0.2), (1.0, 1.0), (45, 0.3), (120, 0.4), (3e2, 1.0),
                       tcp=False, zero_payload_prob=0.0, windows=(-1,), flags=0)),
        (0.15, Profile(BENIGN, (80, 8080), (6, 0.7), (0.6, 1.2), (350, 0.6), (1200, 0.5), (5e4, 1.5), 0.04)),
        (0.10, Profile(BENIGN, (22, 21), (20, 0.8), (0.8, 1.3), (60, 0.6), (80, 0.8), (8e4, 1.6), 0.08)),
        (0.15, Profile(BENIGN, (123, 137, 138, 389, 445, 3268, 5353), (3, 0.8), (0.0, 1.0), (90, 0.6),
                       (150, 0.7), (1e5, 2.0), 0.10, tcp=False, zero_payload_prob=0.0, windows=(-1,), flags=0)),
    ],
    "attack": [
        (0.25, Profile("DDoS", (80,), (4, 0.4), (0.5, 1.0), (10, 1.5), (1460, 0.2), (3e5, 1.2), 0.02,
                       zero_payload_prob=0.6, windows=(8192, 256))),
        (0.25, Profile("PortScan", (0,), (1, 0.3), (0.9, 1.0), (1, 0.1), (1, 0.1), (5e1, 0.8),
                       zero_payload_prob=1.0, windows=(1024, 29200, 0), flags=SYN | RST)),
        (0.20, Profile("DoS Hulk", (80,), (6, 0.3), (0.7, 1.0), (330, 0.4), (1460, 0.3), (2e3, 1.2),
                       windows=(29200, 251))),
        (0.10, Profile("DoS slowloris", (80,), (5, 0.5), (0.2, 0.8), (230, 0.3), (0, 0.1), (1.5e7, 0.7), 0.3,
                       windows=(29200,))),
        (0.10, Profile("SSH-Patator", (22, 21), (18, 0.3), (0.9, 1.2), (50, 0.4), (60, 0.5), (3e4, 1.0),
                       windows=(29200, 26883))),
        (0.10, Profile("Bot", (8080, 80), (3, 0.5), (0.5, 1.5), (200, 0.8), (150, 0.8), (5e4, 1.5), 0.05,
                       windows=(8192,))),
    ],
}


def _lognormal(rng, spec, size=None):
    median, sigma = spec
    return median * np.exp(sigma * rng.standard_normal(size))


def simulate_packets(rng: np.random.Generator, p: Profile):
    """Return (times_us, is_fwd, payload, header, flags, port, init_fwd, init_bwd)."""
    port = int(rng.choice(p.ports))
    if port == 0:
        port = int(rng.choice([rng.integers(1, 1024), rng.integers(1024, 65536)]))
    n_fwd = max(1, int(round(_lognormal(rng, p.fwd_packets))))
    n_bwd = int(round(n_fwd * rng.uniform(*p.bwd_ratio)))
    n = n_fwd + n_bwd

    # first packet is forward, the rest interleave randomly
    is_fwd = np.zeros(n, dtype=bool)
    is_fwd[0] = True
    if n > 1:
        rest = np.array([True] * (n_fwd - 1) + [False] * n_bwd)
        is_fwd[1:] = rng.permutation(rest)

    gaps = _lognormal(rng, p.iat_us, n - 1) if n > 1 else np.empty(0)
    if p.idle_prob and n > 1:
        idle = rng.random(n - 1) < p.idle_prob
        gaps[idle] = _lognormal(rng, p.idle_us, int(idle.sum()))
    gaps = np.floor(gaps)
    times = np.concatenate([[0.0], np.cumsum(gaps)])

    mss = 1460
    payload = np.where(is_fwd, _lognormal(rng, p.fwd_payload, n), _lognormal(rng, p.bwd_payload, n))
    payload = np.clip(np.round(payload), 0, mss)
    payload[rng.random(n) < p.zero_payload_prob] = 0
    if p.tcp:
        header = np.where(rng.random(n) < 0.7, 32, 20)
    else:
        header = np.full(n, 8)

    flags = np.zeros(n, dtype=np.int64)
    if p.tcp:
        flags[:] = ACK
        flags[0] = SYN if p.flags & SYN else ACK
        flags[payload > 0] |= PSH & p.flags
        if p.flags & RST and n > 1:
            flags[-1] = RST
        elif n > 2 and rng.random() < 0.5:
            flags[-1] |= FIN
        if rng.random() < 0.01:
            flags[0] |= URG
        if rng.random() < 0.02:
            flags[0] |= ECE | CWE

    init_fwd = int(rng.choice(p.windows))
    init_bwd = int(rng.choice(p.windows)) if (n_bwd and p.tcp) else -1
    return times, is_fwd, payload, header, flags, port, init_fwd, init_bwd


def _stats(x):
    if len(x) == 0:
        return 0.0, 0.0, 0.0, 0.0
    std = float(np.std(x, ddof=1)) if len(x) > 1 else 0.0
    return float(x.max()), float(x.min()), float(x.mean()), std


def _iat(times):
    d = np.diff(times)
    if len(d) == 0:
        return 0.0, 0.0, 0.0, 0.0, 0.0
    return float(d.sum()), float(d.mean()), float(np.std(d, ddof=1)) if len(d) > 1 else 0.0, float(d.max()), float(d.min())


def _active_idle(times):
    active, idle = [], []
    start = last = times[0]
    for t in times[1:]:
        if t - last > IDLE_THRESHOLD_US:
            active.append(last - start)
            idle.append(t - last)
            start = t
        last = t
    if idle:
        active.append(last - start)
    out = []
    for seq in (active, idle):
        if seq:
            a = np.asarray(seq)
            out += [a.mean(), np.std(a, ddof=1) if len(a) > 1 else 0.0, a.max(), a.min()]
        else:
            out += [0.0, 0.0, 0.0, 0.0]
    return out


def flow_features(times, is_fwd, payload, header, flags, port, init_fwd, init_bwd) -> list[float]:
    """Derive the 78 CICIDS2017 flow features from one packet list."""
    fwd, bwd = payload[is_fwd], payload[~is_fwd]
    n_fwd, n_bwd = len(fwd), len(bwd)
    n = n_fwd + n_bwd
    duration = float(times[-1] - times[0])
    total_bytes = float(payload.sum())
    secs = duration / 1e6
    with np.errstate(divide="ignore", invalid="ignore"):
        flow_bps = np.float64(total_bytes) / np.float64(secs)
        flow_pps = np.float64(n) / np.float64(secs)
        fwd_pps = np.float64(n_fwd) / np.float64(secs) if secs else 0.0
        bwd_pps = np.float64(n_bwd) / np.float64(secs) if secs else 0.0

    f_max, f_min, f_mean, f_std = _stats(fwd)
    b_max, b_min, b_mean, b_std = _stats(bwd)
    a_max, a_min, a_mean, a_std = _stats(payload)
    flow_iat = _iat(times)
    fwd_iat = _iat(times[is_fwd])
    bwd_iat = _iat(times[~is_fwd])
    fwd_hdr = float(header[is_fwd].sum())
    bwd_hdr = float(header[~is_fwd].sum())
    any_flag = lambda bit: float(bool((flags & bit).any()))  # noqa: E731

    return [
        port, duration, n_fwd, n_bwd, float(fwd.sum()), float(bwd.sum()),
        f_max, f_min, f_mean, f_std, b_max, b_min, b_mean, b_std,
        float(flow_bps), float(flow_pps),
        flow_iat[1], flow_iat[2], flow_iat[3], flow_iat[4],
        *fwd_iat, *bwd_iat,
        float(((flags[is_fwd] & PSH) > 0).sum()), 0.0, float(((flags[is_fwd] & URG) > 0).sum()), 0.0,
        fwd_hdr, bwd_hdr, float(fwd_pps), float(bwd_pps),
        a_min, a_max, a_mean, a_std, a_std**2,
        any_flag(FIN), any_flag(SYN), any_flag(RST), any_flag(PSH), any_flag(ACK),
        any_flag(URG), any_flag(CWE), any_flag(ECE),
        float(n_bwd // n_fwd), total_bytes / n,
        f_mean, b_mean, fwd_hdr,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        n_fwd, float(fwd.sum()), n_bwd, float(bwd.sum()),
        init_fwd, init_bwd, float((fwd > 0).sum()), float(header[is_fwd].min()),
        *_active_idle(times),
    ]


def generate(n_flows: int, seed: int, attack_fraction: float = 0.5):
    """Simulate ``n_flows`` records; returns (rows of 78 floats, label strings)."""
    rng = np.random.default_rng(seed)
    n_attack = int(round(n_flows * attack_fraction))
    kinds = np.array(["attack"] * n_attack + ["benign"] * (n_flows - n_attack))
    rng.shuffle(kinds)
    rows, labels = [], []
    for kind in kinds:
        weights, profiles = zip(*PROFILES[kind])
        prof = profiles[rng.choice(len(profiles), p=np.asarray(weights) / sum(weights))]
        rows.append(flow_features(*simulate_packets(rng, prof)))
        labels.append(prof.label)
    return rows, labels


def _cell(v) -> str:
    v = float(v)
    if np.isnan(v):
        return "NaN"
    if np.isinf(v):
        return "Infinity"
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return f"{v:.10g}"


def write_csv(path, rows, labels) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FEATURES + [LABEL])
        for row, label in zip(rows, labels):
            w.writerow([_cell(v) for v in row] + [label])
    return path
