"""Command-line subcommands."""
import argparse

from dfock.cli import channel, demod, figures, matrix_elements, teleport

COMMANDS = (matrix_elements, figures, teleport, demod, channel)


def register_commands(subparsers: argparse._SubParsersAction) -> None:
    """Attach every subcommand parser; each sets `handler` as its default."""
    for command in COMMANDS:
        command.register(subparsers)
