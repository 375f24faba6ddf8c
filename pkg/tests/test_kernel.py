import random

import pytest

from stepnet.errors import SchedulingError
from stepnet.kernel import EventCalendar


def test_schedule_into_empty_calendar():
    cal = EventCalendar()
    cal.schedule(0.5, "x")
    assert len(cal) == 1


def test_equal_time_pops_in_schedule_order():
    cal = EventCalendar()
    first = cal.schedule(1.0, "first")
    second = cal.schedule(1.0, "second")
    assert cal.next() is first
    assert cal.next() is second


def test_scheduling_in_the_past_is_an_error():
    cal = EventCalendar()
    cal.schedule(0.3, "a")
    cal.next()
    assert cal.now == 0.3
    with pytest.raises(SchedulingError):
        cal.schedule(0.2, "late")


def test_non_finite_times_rejected():
    cal = EventCalendar()
    with pytest.raises(SchedulingError):
        cal.schedule(float("inf"), "never")
    with pytest.raises(SchedulingError):
        cal.schedule(float("nan"), "never")


def test_next_returns_minimum_time_event():
    cal = EventCalendar()
    cal.schedule(2.0, "later")
    cal.schedule(1.0, "sooner")
    assert cal.next().payload == "sooner"


def test_next_on_empty_calendar_is_none():
    assert EventCalendar().next() is None


def test_clock_advances_to_popped_event_time():
    cal = EventCalendar()
    cal.schedule(1.0, "a")
    cal.next()
    assert cal.now == 1.0


def test_scheduling_at_current_clock_is_allowed():
    cal = EventCalendar()
    cal.schedule(1.0, "a")
    cal.next()
    cal.schedule(1.0, "b")
    assert cal.next().payload == "b"


def test_cancelled_events_are_never_delivered():
    cal = EventCalendar()
    keep = cal.schedule(1.0, "keep")
    drop = cal.schedule(0.5, "drop")
    cal.cancel(drop)
    cal.cancel(drop)  # idempotent
    assert len(cal) == 1
    assert cal.next() is keep
    assert cal.next() is None


def test_seq_values_unique_and_monotone():
    cal = EventCalendar()
    events = [cal.schedule(0.1, i) for i in range(100)]
    seqs = [e.seq for e in events]
    assert seqs == sorted(seqs)
    assert len(set(seqs)) == len(seqs)


def test_pop_order_is_nondecreasing_over_random_interleaving():
    rng = random.Random(42)
    cal = EventCalendar()
    popped = []
    for _ in range(5000):
        if rng.random() < 0.6 or len(cal) == 0:
            cal.schedule(cal.now + rng.random() * 10.0, None)
        else:
            popped.append(cal.next())
    while (event := cal.next()) is not None:
        popped.append(event)
    keys = [(e.time, e.seq) for e in popped]
    assert keys == sorted(keys)
    assert len({e.seq for e in popped}) == len(popped)
