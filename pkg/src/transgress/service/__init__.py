"""FastAPI service wrapping the scenario runner."""
