from src.reproduce.reproducer import Reproducer, format_table, summarize

__all__ = ["Reproducer", "format_table", "summarize"]
