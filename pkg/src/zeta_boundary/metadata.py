"""
Run metadata embedded in every emitted table.

The metadata names the tool version, a hash of the resolved configuration and
the seed. It holds no timestamp or host name: two runs of the same
configuration produce byte-identical files.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional

logger = logging.getLogger(__name__)

TOOL_NAME = "zeta-boundary"


def _canonical(value: Any) -> Any:
    """Recursively convert to JSON-compatible builtins with sorted keys."""
    if isinstance(value, Mapping):
        return {str(k): _canonical(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "item"):
        return _canonical(value.item())
    return value


def config_hash(config: Mapping[str, Any]) -> str:
    """
    SHA-256 of the canonical JSON encoding of ``config``.

    Floats are encoded by repr, so equal configurations hash equally regardless
    of key order.
    """
    encoded = json.dumps(_canonical(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(encoded.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunMetadata:
    """
    Reproducibility header of an output file.

    Args:
        command: Subcommand or operation that produced the file
        version: Package version
        config_hash: Hash of the resolved configuration
        seed: Seed of any random component
        extra: Additional key/value pairs (curve label, plan, variant)
    """

    command: str
    version: str
    config_hash: str
    seed: Optional[int] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "tool": TOOL_NAME,
            "command": self.command,
            "version": self.version,
            "config_hash": self.config_hash,
            "seed": self.seed,
        }
        data.update({k: self.extra[k] for k in sorted(self.extra)})
        return data

    def header_lines(self) -> List[str]:
        """Lines of the form ``# key: value`` for CSV output."""
        return [f"# {key}: {value}" for key, value in self.to_dict().items()]

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunMetadata":
        known = {"tool", "command", "version", "config_hash", "seed"}
        seed = data.get("seed")
        return cls(
            command=str(data.get("command", "")),
            version=str(data.get("version", "")),
            config_hash=str(data.get("config_hash", "")),
            seed=None if seed in (None, "None", "") else int(seed),
            extra={k: v for k, v in data.items() if k not in known},
        )


def create_run_metadata(
    command: str,
    config: Mapping[str, Any],
    seed: Optional[int] = None,
    **extra: Any,
) -> RunMetadata:
    """
    Convenience function to build metadata for a resolved configuration.

    Args:
        command: Producing subcommand
        config: Resolved configuration as a mapping
        seed: Seed of the run
        **extra: Additional header fields

    Returns:
        RunMetadata instance
    """
    from . import __version__

    digest = config_hash(config)
    logger.info(f"Run metadata for '{command}': config hash {digest[:12]}")
    return RunMetadata(command, __version__, digest, seed, dict(extra))
