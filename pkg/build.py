#!/usr/bin/env python3
"""
Build script for enzgrid.

Creates standalone executables of the command-line tool:
- Windows: .exe file
- Linux: single binary

Usage:
    python build.py          # Build for current platform
    python build.py --clean  # Remove build artifacts
"""

import argparse
import platform
import shutil
import subprocess
import sys
from pathlib import Path

PROJECT_NAME = "enzgrid"
VERSION = "0.1.0"
MAIN_SCRIPT = "src/enzgrid/cli.py"

HIDDEN_IMPORTS = [
    "yaml",
    "numpy",
    "pandas",
    "scipy.special",
    "scipy.optimize",
    "scipy.integrate",
    "scipy.interpolate",
    "scipy.ndimage",
]


def run_command(cmd, **kwargs):
    """Run a command and print output."""
    print(f"Running: {' '.join(cmd)}")
    result = subprocess.run(cmd, **kwargs)
    return result.returncode == 0


def pyinstaller_command(data_separator: str):
    cmd = [
        sys.executable, "-m", "PyInstaller",
        "--onefile",
        "--name", PROJECT_NAME,
        "--add-data", f"configs{data_separator}configs",
        "--console",
    ]
    for module in HIDDEN_IMPORTS:
        cmd += ["--hidden-import", module]
    cmd.append(MAIN_SCRIPT)
    return cmd


def build(exe_name: str, data_separator: str) -> bool:
    print(f"\n=== Building {exe_name} ===\n")
    if not run_command(pyinstaller_command(data_separator)):
        print("ERROR: PyInstaller build failed")
        return False

    exe_path = Path("dist") / exe_name
    if exe_path.exists():
        print(f"\nSUCCESS: Built {exe_path}")
        print(f"Size: {exe_path.stat().st_size / 1024 / 1024:.2f} MB")
        return True
    return False


def clean():
    """Clean build artifacts."""
    dirs_to_remove = ["build", "dist", "__pycache__", "*.egg-info"]
    files_to_remove = ["*.spec"]

    for pattern in dirs_to_remove:
        for path in Path(".").glob(pattern):
            if path.is_dir():
                print(f"Removing directory: {path}")
                shutil.rmtree(path)

    for pattern in files_to_remove:
        for path in Path(".").glob(pattern):
            if path.is_file():
                print(f"Removing file: {path}")
                path.unlink()

    print("Clean complete.")


def main():
    parser = argparse.ArgumentParser(description="Build the enzgrid executable")
    parser.add_argument("--clean", action="store_true", help="Clean build artifacts")

    args = parser.parse_args()

    if args.clean:
        clean()
        return

    try:
        import PyInstaller  # noqa: F401
    except ImportError:
        print("ERROR: PyInstaller not installed. Run: pip install pyinstaller")
        sys.exit(1)

    system = platform.system()
    if system == "Windows":
        ok = build(f"{PROJECT_NAME}.exe", ";")
    elif system in ("Linux", "Darwin"):
        ok = build(PROJECT_NAME, ":")
    else:
        print(f"Unsupported platform: {system}")
        sys.exit(1)
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
