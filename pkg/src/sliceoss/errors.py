"""Error types shared across modules.

Each error carries a stable machine-readable ``code`` so the REST layer can
map failures onto a uniform error body without string matching.
"""

from __future__ import annotations


class SliceOssError(Exception):
    """Base class; ``code`` is stable, ``message`` is human-oriented."""

    code = "Error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


class IllegalTransition(SliceOssError):
    code = "IllegalTransition"


class InvalidValueType(SliceOssError):
    code = "InvalidValueType"


class ValueViolation(SliceOssError):
    code = "ValueViolation"


class UnknownCharacteristic(SliceOssError):
    code = "UnknownCharacteristic"


class UnresolvedPart(SliceOssError):
    code = "UnresolvedPart"


class DuplicateAttributeName(SliceOssError):
    code = "DuplicateAttributeName"


class MalformedTemplate(SliceOssError):
    code = "MalformedTemplate"


class UnknownSpec(SliceOssError):
    code = "UnknownSpec"


class DuplicateName(SliceOssError):
    code = "DuplicateName"


class CycleDetected(SliceOssError):
    code = "CycleDetected"


class UnknownCategory(SliceOssError):
    code = "UnknownCategory"


class UnknownService(SliceOssError):
    code = "UnknownService"


class UnknownOrder(SliceOssError):
    code = "UnknownOrder"


class NotOrderable(SliceOssError):
    code = "NotOrderable"


class TaskNotOpen(SliceOssError):
    code = "TaskNotOpen"


class UnknownTask(SliceOssError):
    code = "UnknownTask"


class InvalidResolution(SliceOssError):
    code = "InvalidResolution"


class UnknownDeployment(SliceOssError):
    code = "UnknownDeployment"


class UnknownNsd(SliceOssError):
    code = "UnknownNsd"


class DuplicateNsd(SliceOssError):
    code = "DuplicateNsd"


class UnknownInstance(SliceOssError):
    code = "UnknownInstance"


class AlreadyTerminal(SliceOssError):
    code = "AlreadyTerminal"


class UnknownTopic(SliceOssError):
    code = "UnknownTopic"


class CorruptStore(SliceOssError):
    code = "CorruptStore"


class DuplicatePartner(SliceOssError):
    code = "DuplicatePartner"


class UnknownPartner(SliceOssError):
    code = "UnknownPartner"


class PartnerUnreachable(SliceOssError):
    code = "PartnerUnreachable"


class RemoteRejected(SliceOssError):
    code = "RemoteRejected"


class NotAuthorized(SliceOssError):
    code = "NotAuthorized"


class Forbidden(SliceOssError):
    code = "Forbidden"


class NotFound(SliceOssError):
    code = "NotFound"


class BadRequest(SliceOssError):
    code = "BadRequest"
