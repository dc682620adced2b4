"""
Base exception for enzgrid.

Every sub-package derives its own errors from EnzGridError so the CLI can
map any failure onto an exit code and a machine-readable JSON document.
"""

from typing import Any, Dict


class EnzGridError(Exception):
    """Base exception for all enzgrid errors."""

    exit_code = 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code,
        }


class ConfigError(EnzGridError):
    """Raised when a configuration document violates the schema."""

    exit_code = 2

    def __init__(self, message: str, path: str = ""):
        self.path = path
        where = f" at '{path}'" if path else ""
        super().__init__(f"Invalid configuration{where}: {message}")

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["path"] = self.path
        return data
