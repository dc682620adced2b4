"""
Data types persisted by the result store.
"""

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, Optional


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec='seconds')


@dataclass
class RunManifest:
    """
    Provenance of one command: what went in (with digests), what came out,
    and, for analyses, which run manifest was consumed.
    """
    command: str
    name: str
    config_digest: str
    tool_version: str
    started_at: str = field(default_factory=utc_now)
    finished_at: Optional[str] = None
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    parent_digest: Optional[str] = None
    variant: Optional[str] = None
    status: Dict[str, Any] = field(default_factory=dict)

    @property
    def key(self) -> str:
        suffix = f"-{self.variant}" if self.variant else ""
        return f"{self.name}{suffix}-{self.config_digest[:12]}"

    def finish(self) -> None:
        self.finished_at = utc_now()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'name': self.name,
            'variant': self.variant,
            'config_digest': self.config_digest,
            'tool_version': self.tool_version,
            'started_at': self.started_at,
            'finished_at': self.finished_at,
            'inputs': dict(self.inputs),
            'outputs': dict(self.outputs),
            'parent_digest': self.parent_digest,
            'status': dict(self.status),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunManifest':
        return cls(
            command=data['command'],
            name=data['name'],
            config_digest=data['config_digest'],
            tool_version=data['tool_version'],
            started_at=data.get('started_at', ''),
            finished_at=data.get('finished_at'),
            inputs=dict(data.get('inputs', {})),
            outputs=dict(data.get('outputs', {})),
            parent_digest=data.get('parent_digest'),
            variant=data.get('variant'),
            status=dict(data.get('status', {})),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, json_str: str) -> 'RunManifest':
        return cls.from_dict(json.loads(json_str))
