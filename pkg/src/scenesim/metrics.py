"""Event-driven metric accumulation and CSV export.

One ledger per replication.  Correctness of the belief is tracked as exact
intervals from transition timestamps (never sampled); live-object counts are
sampled on the hour from the running counters; arrival histograms fold to
hour-of-day.  Everything before the warm-up end and after the run end is
excluded.
"""

from __future__ import annotations

import csv
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DegenerateTask, EmptyMeasurement
from .stochastic import SECONDS_PER_DAY, SECONDS_PER_HOUR


def fmt(value) -> str:
    """Floats at 6 significant digits; everything else as-is."""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def task_delay(task) -> float:
    """Normalized prediction error |t_pred - t_true| / t_true (durations)."""
    true_duration = task.t_completed - task.t_assigned
    if true_duration <= 0:
        raise DegenerateTask(f"task {task.id!r} completed in zero time")
    pred_duration = task.t_pred - task.t_assigned
    return abs(pred_duration - true_duration) / true_duration


def signed_task_delay(task) -> float:
    true_duration = task.t_completed - task.t_assigned
    if true_duration <= 0:
        raise DegenerateTask(f"task {task.id!r} completed in zero time")
    return (task.t_pred - task.t_assigned - true_duration) / true_duration


class MetricsLedger:
    """Accumulators for one replication; mutated only by its kernel."""

    def __init__(self, warmup_end: float, t_end: float, object_classes):
        if t_end <= warmup_end:
            raise ValueError("t_end must exceed warmup_end")
        self.warmup_end = warmup_end
        self.t_end = t_end
        self.object_classes = sorted(object_classes)
        # node -> [accumulated correct seconds, last transition t, current state]
        self._correct: dict[str, list] = {}
        self._live = Counter()  # class -> current live count
        # (class, hour-of-day) -> [sum of sampled counts, number of samples]
        self._live_bins = defaultdict(lambda: [0, 0])
        first_hour = math.ceil(warmup_end / SECONDS_PER_HOUR) * SECONDS_PER_HOUR
        self._next_sample_t = first_hour
        self.true_arrivals = Counter()      # (node, hour-of-day) -> count
        self.observed_arrivals = Counter()  # (node, hour-of-day) -> count
        self._seen_objects: set[str] = set()
        self.heatmap = Counter()            # node -> merge coverage count
        self._last_obs: dict[str, float] = {}
        self._gap_sum = Counter()
        self._gap_count = Counter()
        self.tasks: list = []
        self.counters = Counter()
        self.rtf: float | None = None
        self._finalized = False

    # -- windowing helpers ----------------------------------------------------

    def _in_window(self, t: float) -> bool:
        return self.warmup_end <= t <= self.t_end

    @staticmethod
    def _hour_of_day(t: float) -> int:
        return int((t % SECONDS_PER_DAY) // SECONDS_PER_HOUR)

    # -- correctness intervals ------------------------------------------------

    def set_correct(self, t: float, node: str, correct: bool):
        """Record a belief-correctness transition at ``t`` for ``node``.

        Nodes start correct at t=0 (both graphs are seeded empty).
        """
        entry = self._correct.setdefault(node, [0.0, 0.0, True])
        self._accumulate(entry, t)
        entry[1] = t
        entry[2] = correct

    def _accumulate(self, entry, t: float):
        lo = max(entry[1], self.warmup_end)
        hi = min(t, self.t_end)
        if entry[2] and hi > lo:
            entry[0] += hi - lo

    def up_to_date_share(self, path_node_ids) -> float:
        """Mean over path nodes of the correct-time fraction, in percent."""
        window = self.t_end - self.warmup_end
        if window <= 0:
            raise EmptyMeasurement("measurement window is empty")
        if not self._finalized:
            raise RuntimeError("finalize() must run before reading shares")
        total = 0.0
        n = 0
        for node in path_node_ids:
            entry = self._correct.get(node)
            correct_time = window if entry is None else entry[0]
            total += correct_time / window
            n += 1
        if n == 0:
            raise EmptyMeasurement("no path nodes")
        return 100.0 * total / n

    # -- live counts ----------------------------------------------------------

    def on_live_change(self, t: float, object_class: str, delta: int):
        self._sample_live_up_to(t)
        self._live[object_class] += delta

    def _sample_live_up_to(self, t: float):
        limit = min(t, self.t_end)
        while self._next_sample_t <= limit:
            hour = self._hour_of_day(self._next_sample_t)
            for cls in self.object_classes:
                bin_ = self._live_bins[(cls, hour)]
                bin_[0] += self._live[cls]
                bin_[1] += 1
            self._next_sample_t += SECONDS_PER_HOUR

    def live_count_by_hour(self) -> dict:
        """(class, hour-of-day) -> mean sampled live count."""
        return {
            key: (s / n if n else 0.0)
            for key, (s, n) in sorted(self._live_bins.items())
        }

    def mean_live(self, object_class: str) -> float:
        total = n = 0
        for (cls, _), (s, samples) in self._live_bins.items():
            if cls == object_class:
                total += s
                n += samples
        if n == 0:
            raise EmptyMeasurement(f"no live-count samples for {object_class!r}")
        return total / n

    # -- arrivals and observations ---------------------------------------------

    def on_true_arrival(self, t: float, node: str):
        if self._in_window(t):
            self.true_arrivals[(node, self._hour_of_day(t))] += 1

    def on_merge(self, t: float, observation):
        in_window = self._in_window(t)
        for node in observation.path_nodes:
            if in_window:
                self.heatmap[node] += 1
                last = self._last_obs.get(node)
                if last is not None:
                    self._gap_sum[node] += t - last
                    self._gap_count[node] += 1
                self._last_obs[node] = t
        for node, objs in observation.objects_at.items():
            for obj in objs:
                if obj.id not in self._seen_objects:
                    self._seen_objects.add(obj.id)
                    if in_window:
                        self.observed_arrivals[(node, self._hour_of_day(t))] += 1

    def inter_observation_stats(self) -> dict:
        """node -> mean gap between consecutive observations; needs >= 2 obs."""
        return {
            node: self._gap_sum[node] / count
            for node, count in sorted(self._gap_count.items())
            if count > 0
        }

    # -- tasks ------------------------------------------------------------------

    def record_task(self, task):
        """Keep tasks assigned inside the measurement window."""
        if task.t_assigned >= self.warmup_end:
            self.tasks.append(task)
        else:
            self.counters["tasks_warmup"] += 1

    def mean_task_delay_pct(self) -> float | None:
        delays = []
        for task in self.tasks:
            if task.t_completed - task.t_assigned > 0:
                delays.append(task_delay(task))
            else:
                self.counters["degenerate_tasks"] += 1
        if not delays:
            return None
        return 100.0 * sum(delays) / len(delays)

    # -- lifecycle ---------------------------------------------------------------

    def finalize(self):
        """Close all open intervals and sampling at t_end."""
        if self._finalized:
            return
        self._sample_live_up_to(self.t_end)
        for entry in self._correct.values():
            self._accumulate(entry, self.t_end)
            entry[1] = self.t_end
        self._finalized = True


# -- aggregation and CSV export -------------------------------------------------


def summary_metrics(ledger: MetricsLedger, path_node_ids) -> dict:
    delay = ledger.mean_task_delay_pct()
    row = {
        "rtf": ledger.rtf,
        "up_to_date_share_pct": ledger.up_to_date_share(path_node_ids),
        "mean_task_delay_pct": delay,
        "tasks_completed": len(ledger.tasks),
        "objects_spawned": ledger.counters["spawned"],
        "objects_expired": ledger.counters["expired"],
        "discarded_private": ledger.counters["discarded_private"],
        "discarded_capacity": ledger.counters["discarded_capacity"],
    }
    return row


def _mean_std(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    mean = sum(vals) / len(vals)
    if len(vals) < 2:
        return mean, None
    var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
    return mean, math.sqrt(var)


def write_outputs(ledgers, graph, outdir):
    """Write all metric CSVs for a list of replication ledgers."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path_nodes = sorted(graph.path_nodes)

    rows = []
    per_rep = []
    for i, ledger in enumerate(ledgers):
        metrics = summary_metrics(ledger, path_nodes)
        per_rep.append(metrics)
        for name, value in metrics.items():
            rows.append((i, name, "" if value is None else fmt(value)))
    for name in per_rep[0]:
        mean, std = _mean_std([m[name] for m in per_rep])
        rows.append(("mean", name, "" if mean is None else fmt(mean)))
        rows.append(("std", name, "" if std is None else fmt(std)))
    with open(outdir / "summary.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["replication", "metric", "value"])
        writer.writerows(rows)

    with open(outdir / "daily_trends.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["replication", "object_class", "hour", "mean_live_count"])
        for i, ledger in enumerate(ledgers):
            counts = ledger.live_count_by_hour()
            for cls in ledger.object_classes:
                for hour in range(24):
                    writer.writerow([i, cls, hour, fmt(counts.get((cls, hour), 0.0))])

    with open(outdir / "arrivals_by_node_hour.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["replication", "node", "hour", "true_count", "observed_count"])
        for i, ledger in enumerate(ledgers):
            keys = sorted(set(ledger.true_arrivals) | set(ledger.observed_arrivals))
            for node, hour in keys:
                writer.writerow([
                    i, node, hour,
                    ledger.true_arrivals[(node, hour)],
                    ledger.observed_arrivals[(node, hour)],
                ])

    with open(outdir / "heatmap.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["replication", "node", "x", "y", "observations"])
        for i, ledger in enumerate(ledgers):
            for node in path_nodes:
                x, y = graph.node_position(node)
                writer.writerow([i, node, fmt(x), fmt(y), ledger.heatmap[node]])

    with open(outdir / "tasks.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow([
            "replication", "task", "t_issued", "t_assigned",
            "t_pred", "t_completed", "signed_delay",
        ])
        for i, ledger in enumerate(ledgers):
            for task in ledger.tasks:
                degenerate = task.t_completed - task.t_assigned <= 0
                writer.writerow([
                    i, task.id, fmt(task.t_issued), fmt(task.t_assigned),
                    fmt(task.t_pred), fmt(task.t_completed),
                    "" if degenerate else fmt(signed_task_delay(task)),
                ])
