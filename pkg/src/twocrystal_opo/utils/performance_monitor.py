"""
Performance Monitor Module

This module provides timing and counter collection for sweeps, linear solves
and validation runs.
"""

import itertools
import logging
import threading
import time
from collections import defaultdict
from contextlib import contextmanager
from typing import Dict

logger = logging.getLogger(__name__)

MAX_SAMPLES = 1000


class PerformanceMonitor:
    """Thread-safe timers, counters and metric series."""

    _instance = None
    _lock = threading.Lock()

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not hasattr(self, 'initialized'):
            self.metrics = defaultdict(list)
            self.counters = defaultdict(int)
            self.timers = {}
            self.timer_ids = itertools.count()
            self.metrics_lock = threading.Lock()
            self.initialized = True

    def start_timer(self, operation: str) -> str:
        """
        Start a timer for an operation.

        Args:
            operation: Name of the operation

        Returns:
            Timer ID for stopping the timer
        """
        with self.metrics_lock:
            timer_id = f"{operation}_{next(self.timer_ids)}"
            self.timers[timer_id] = (operation, time.perf_counter())
        return timer_id

    def stop_timer(self, timer_id: str) -> float:
        """
        Stop a timer and record its duration.

        Returns:
            Elapsed seconds, or 0.0 for an unknown timer
        """
        with self.metrics_lock:
            entry = self.timers.pop(timer_id, None)
        if entry is None:
            return 0.0
        operation, started = entry
        duration = time.perf_counter() - started
        self.record_metric(f"{operation}_duration", duration)
        return duration

    def increment_counter(self, counter_name: str, value: int = 1):
        with self.metrics_lock:
            self.counters[counter_name] += value

    def record_metric(self, metric_name: str, value: float):
        with self.metrics_lock:
            series = self.metrics[metric_name]
            series.append(value)
            if len(series) > MAX_SAMPLES:
                series.pop(0)

    def get_stats(self) -> Dict:
        """
        Get performance statistics.

        Returns:
            Dictionary with 'counters' and per-metric count/avg/min/max/total
        """
        with self.metrics_lock:
            stats = {'counters': dict(self.counters), 'metrics': {}}
            for metric_name, values in self.metrics.items():
                if values:
                    stats['metrics'][metric_name] = {
                        'count': len(values),
                        'avg': sum(values) / len(values),
                        'min': min(values),
                        'max': max(values),
                        'total': sum(values),
                    }
            return stats

    def log_performance_summary(self):
        stats = self.get_stats()

        logger.info("=" * 60)
        logger.info("PERFORMANCE SUMMARY")
        logger.info("=" * 60)

        if stats['counters']:
            logger.info("Counters:")
            for counter, value in sorted(stats['counters'].items()):
                logger.info(f"  {counter}: {value}")

        if stats['metrics']:
            logger.info("Timings:")
            for metric, data in sorted(stats['metrics'].items()):
                logger.info(f"  {metric}: count={data['count']} total={data['total']:.3f}s "
                            f"avg={data['avg']:.4f}s max={data['max']:.4f}s")

        logger.info("=" * 60)


performance_monitor = PerformanceMonitor()


def start_timer(operation: str) -> str:
    return performance_monitor.start_timer(operation)


def stop_timer(timer_id: str) -> float:
    return performance_monitor.stop_timer(timer_id)


@contextmanager
def timed(operation: str):
    """Time the enclosed block under the given operation name."""
    timer_id = start_timer(operation)
    try:
        yield
    finally:
        stop_timer(timer_id)


def increment_counter(counter_name: str, value: int = 1):
    performance_monitor.increment_counter(counter_name, value)


def get_counter(counter_name: str) -> int:
    return performance_monitor.get_stats()['counters'].get(counter_name, 0)


def log_performance_summary():
    performance_monitor.log_performance_summary()
