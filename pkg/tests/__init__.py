"""Unit tests for memory buffers application."""
