from abc import ABC, abstractmethod
from typing import Iterable, Optional

from rich.console import Console
from rich.status import Status
from rich.table import Table

from ctspectra.theme_config import THEMES, ThemeIndex


class Writer(ABC):
    """Base output interface"""

    @abstractmethod
    def print(self, message: Optional[str] = "", *args, **kwargs) -> None:
        """Print the given message"""

    @abstractmethod
    def warn(self, message: str) -> None:
        """Report a non-fatal condition"""


class ConsoleWriter(Writer):
    """Console output of the tool, shared through the module-level writer"""

    def __init__(self, theme_index: ThemeIndex = ThemeIndex.DEFAULT) -> None:

        self.theme_index = theme_index
        self.console = Console(theme=THEMES[theme_index])

    def print(self, message: Optional[str] = "", *args, **kwargs) -> None:

        self.console.print(message, *args, **kwargs)

    def warn(self, message: str) -> None:
        """Print the given message as a warning

        Used for conditions under which results are still produced but the
        asymptotic formulas may not describe them well.

        :type message: str
        :param message: Warning text
        """

        self.console.print(f"[warning]warning:[/] {message}")

    def status(self, message: str) -> Status:
        """Spinner shown while a long computation runs

        :type message: str
        :param message: Text next to the spinner
        :rtype: Status
        :returns: Context manager of the spinner
        """

        return self.console.status(f"[waitspinner]{message}...")

    def parameter_table(self, title: str, rows: Iterable[tuple[str, str]]) -> Table:
        """Two-column table of named values

        :type title: str
        :param title: Table title
        :type rows: iterable
        :param rows: (name, formatted value) pairs
        :rtype: Table
        :returns: Table ready to print
        """

        table = Table(title=title, title_style="banner")
        table.add_column("parameter", style="param")
        table.add_column("value", style="value")
        for name, value in rows:
            table.add_row(name, value)

        return table

    def set_theme(self, theme_index: int) -> None:
        """Set console theme, unknown indexes fall back to the default

        :type theme_index: int
        :param theme_index: Theme index to select
        """

        try:
            self.theme_index = ThemeIndex(theme_index)
        except ValueError:
            self.theme_index = ThemeIndex.DEFAULT

        self.console = Console(theme=THEMES[self.theme_index])


writer = ConsoleWriter()
