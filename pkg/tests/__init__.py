"""Package module for tests."""
