"""In-process event bus with a durable log and at-least-once delivery.

Publishing appends the event to the store and queues it; ``drain`` delivers
queued events to subscribers in publish order, which also keeps events with
the same correlation id ordered.  A batch is acknowledged in the store only
after every subscriber ran and the post-batch hook (the snapshot write)
finished, so a crash at any point leaves either the effects on disk or the
event unacknowledged for redelivery.
"""

from __future__ import annotations

import logging
import os
import uuid
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .canon import format_ts, now_utc
from .errors import UnknownTopic
from .store import EventStore

logger = logging.getLogger(__name__)

TOPICS = (
    "ORDER.CREATED",
    "ORDER.STATE.CHANGED",
    "SERVICE.CREATED",
    "SERVICE.STATE.CHANGED",
    "NFV.DEPLOY.REQUEST",
    "NFV.DEPLOY.RESULT",
    "CATALOG.CHANGED",
)


@dataclass
class Event:
    event_id: str
    topic: str
    occurred_at: str
    payload: dict
    correlation_id: str

    def to_dict(self) -> dict:
        return {
            "eventId": self.event_id,
            "topic": self.topic,
            "occurredAt": self.occurred_at,
            "payload": self.payload,
            "correlationId": self.correlation_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Event":
        return cls(
            event_id=data["eventId"],
            topic=data["topic"],
            occurred_at=data["occurredAt"],
            payload=data["payload"],
            correlation_id=data["correlationId"],
        )


@dataclass
class _Subscriber:
    name: str
    handler: Callable[[Event], None]
    seen: set = field(default_factory=set)


class EventBus:
    def __init__(
        self,
        store: EventStore | None = None,
        crash_after_topic: str | None = None,
    ):
        self._store = store
        self._subscribers: dict[str, list[_Subscriber]] = {t: [] for t in TOPICS}
        self._queue: deque[Event] = deque()
        self._draining = False
        self._post_batch_hook: Callable[[list[Event]], None] | None = None
        # Test hook: hard-exit right after appending an event with this
        # topic to the log, before it is delivered or acknowledged.
        self._crash_after_topic = crash_after_topic

    def set_post_batch_hook(self, hook: Callable[[list[Event]], None]) -> None:
        self._post_batch_hook = hook

    def subscribe(self, topic: str, handler: Callable[[Event], None], name: str) -> None:
        """Register a handler; delivery order follows subscription order."""
        if topic not in self._subscribers:
            raise UnknownTopic(f"no topic {topic!r}")
        self._subscribers[topic].append(_Subscriber(name=name, handler=handler))

    def publish(self, topic: str, payload: dict, correlation_id: str) -> Event:
        if topic not in self._subscribers:
            raise UnknownTopic(f"no topic {topic!r}")
        event = Event(
            event_id=str(uuid.uuid4()),
            topic=topic,
            occurred_at=format_ts(now_utc()),
            payload=payload,
            correlation_id=correlation_id,
        )
        if self._store is not None:
            self._store.append_event(event.to_dict())
        if self._crash_after_topic == topic:
            logger.warning("crash hook firing after append of %s", topic)
            os._exit(9)
        self._queue.append(event)
        return event

    def enqueue(self, event: Event) -> None:
        """Queue an already-logged event for delivery (redelivery path)."""
        self._queue.append(event)

    def deliver(self, event: Event) -> None:
        """Push one event through its subscribers, each at most once."""
        for subscriber in self._subscribers[event.topic]:
            if event.event_id in subscriber.seen:
                continue
            subscriber.seen.add(event.event_id)
            try:
                subscriber.handler(event)
            except Exception:
                # A broken handler must not wedge delivery for the rest.
                logger.exception(
                    "handler %s failed on %s %s", subscriber.name, event.topic, event.event_id
                )

    def drain(self) -> int:
        """Deliver until the queue is empty; snapshot, then acknowledge.

        Reentrant calls (a handler causing a publish) return immediately;
        the outer loop picks the new events up in the same batch.
        """
        if self._draining:
            return 0
        self._draining = True
        processed: list[Event] = []
        try:
            while self._queue:
                event = self._queue.popleft()
                self.deliver(event)
                processed.append(event)
        finally:
            self._draining = False
        if processed:
            if self._post_batch_hook is not None:
                self._post_batch_hook(processed)
            if self._store is not None:
                self._store.append_acks([e.event_id for e in processed])
        return len(processed)

    def pending(self) -> int:
        return len(self._queue)
