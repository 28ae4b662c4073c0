"""Paced engine loop: drives ticks at the frame rate against either the
internal simulator or live UDP receivers, publishes snapshots, and hands
commands to the radio.

The runner owns the tick thread. Everything the gateway or CLI wants to
change mid-run goes through the engine's inboxes (drained between ticks) or
the runner's pause/resume/step controls.
"""

from __future__ import annotations

import threading
import time
from collections import deque

from .config import EngineConfig
from .engine import (
    Engine,
    EngineTickReport,
    Mailbox,
    UdpReceiver,
    decode_referee_packet,
    decode_vision_packet,
)
from .gateway import SnapshotBus, build_snapshot
from .radio import RadioDispatcher
from .sim import (
    EventKind,
    MatchEvent,
    PassTracker,
    Simulator,
    initial_world,
    sim_config_from,
)
from .world import BallState, GamePhase, Vec2, WorldFrame, with_ball

RECENT_EVENTS = 50


class EngineRunner(threading.Thread):
    """Background match loop in `sim` or `udp` mode."""

    def __init__(
        self,
        config: EngineConfig | None = None,
        mode: str = "sim",
        seed: int = 0,
        n_ours: int = 6,
        n_theirs: int = 6,
        bus: SnapshotBus | None = None,
        dispatch: bool = False,
        max_ticks: int | None = None,
        realtime: bool = True,
    ):
        super().__init__(name=f"engine-{mode}", daemon=True)
        if mode not in ("sim", "udp"):
            raise ValueError(f"unknown runner mode {mode!r}")
        self.config = config or EngineConfig()
        self.mode = mode
        self.engine = Engine(self.config)
        self.bus = bus or SnapshotBus()
        self.max_ticks = max_ticks
        self.realtime = realtime
        self.events: deque[MatchEvent] = deque(maxlen=RECENT_EVENTS)
        self.reports: deque[EngineTickReport] = deque(maxlen=8)
        self._shutdown = threading.Event()
        self._running = threading.Event()  # cleared = paused
        self._running.set()
        self._step_once = threading.Event()
        self._radio = RadioDispatcher(list(self.config.endpoints)) if dispatch else None
        if mode == "sim":
            self._sim = Simulator(sim_config_from(self.config, seed), self.config.geo,
                                  self.config.params)
            self._world = initial_world(seed, self.config.geo, n_ours, n_theirs)
            self._tracker = PassTracker()
            self._vision = None
            self._referee = None
        else:
            self._sim = None
            self._world = None
            self._mailbox = Mailbox()
            self._vision = UdpReceiver(self.config.vision_port, decode_vision_packet,
                                       self._mailbox.put, "vision-rx")
            self._referee = UdpReceiver(self.config.referee_port, decode_referee_packet,
                                        self.engine.post_referee, "referee-rx")

    # -- operator controls ----------------------------------------------------

    def pause(self):
        self._running.clear()

    def resume(self):
        self._running.set()

    def step_once(self):
        self._step_once.set()

    @property
    def paused(self) -> bool:
        return not self._running.is_set()

    def stop(self):
        self._shutdown.set()
        self._running.set()

    # -- the loop --------------------------------------------------------------

    def run(self):
        try:
            if self.mode == "udp":
                self._vision.start()
                self._referee.start()
            ticks = 0
            while not self._shutdown.is_set():
                if self.max_ticks is not None and ticks >= self.max_ticks:
                    break
                if self.paused and not self._step_once.is_set():
                    time.sleep(0.01)
                    continue
                self._step_once.clear()
                started = time.perf_counter()
                if self.mode == "sim":
                    self._tick_sim()
                    ticks += 1
                else:
                    ticks += self._tick_udp()
                if self.realtime:
                    rest = self.config.dt - (time.perf_counter() - started)
                    if rest > 0:
                        time.sleep(rest)
        finally:
            if self._vision is not None:
                self._vision.stop()
            if self._referee is not None:
                self._referee.stop()
            if self._radio is not None:
                self._radio.close()

    def _publish(self, report: EngineTickReport, world: WorldFrame):
        self.reports.append(report)
        self.bus.publish(build_snapshot(report, world, list(self.events)))

    def _tick_sim(self):
        engine = self.engine
        phase_before = engine.phase
        engine.drain_inboxes()
        if engine.phase is not phase_before:
            self.events.append(MatchEvent(self._sim.tick_index, EventKind.PHASE_CHANGE,
                                          (engine.phase.value,)))
        world_in = self._world
        report = engine.tick(world_in)
        if self._radio is not None:
            self._radio.dispatch(report.commands)
        next_world, new_events = self._sim.step(world_in, report.commands)
        for event in new_events:
            self.events.append(event)
            completed = self._tracker.observe(event)
            if completed is not None:
                self.events.append(completed)
        geo = self.config.geo
        ball = next_world.ball.position
        if abs(ball.x) > geo.half_length or abs(ball.y) > geo.half_width:
            next_world = with_ball(next_world, BallState(Vec2(0.0, 0.0)))
            self._tracker.reset()
        self._world = next_world
        self._publish(report, world_in)

    def _tick_udp(self) -> int:
        world = self._mailbox.take(timeout=0.25)
        if world is None:
            return 0
        engine = self.engine
        engine.drain_inboxes()
        report = engine.tick(world)
        if self._radio is not None:
            self._radio.dispatch(report.commands)
        self._publish(report, world)
        return 1

    def kickoff(self):
        """Convenience: STOP then FORCE_START before the first tick."""
        from .world import RefereeCommand

        self.engine.phase = GamePhase.STOP
        self.engine.post_referee(RefereeCommand.FORCE_START)
