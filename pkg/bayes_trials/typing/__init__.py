"""TypedDict shapes of the JSON run configuration and report."""
