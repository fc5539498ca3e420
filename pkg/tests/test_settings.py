"""Unit tests for settings configuration."""
import os
from unittest.mock import patch

import pytest
from pydantic import ValidationError

from src.config.settings import Settings, get_settings


class TestSettings:
    """Test settings configuration."""

    def test_default_settings(self):
        """Test default settings values."""
        settings = Settings()
        assert settings.resolv_threads == 1
        assert settings.lattice_cap == 10_000_000
        assert settings.quadrature_tolerance == 1e-10
        assert settings.hessian_mesh_points == 101
        assert settings.comparison_sigmas == 3.0
        assert settings.default_reps == 2000
        assert settings.budget_seconds == 60
        assert settings.log_level == "INFO"

    def test_custom_settings(self):
        """Test creating settings with custom values."""
        settings = Settings(resolv_threads=4, lattice_cap=1000)
        assert settings.resolv_threads == 4
        assert settings.lattice_cap == 1000
        # Other values should remain default
        assert settings.default_reps == 2000

    @patch.dict(os.environ, {
        "RESOLV_THREADS": "8",
        "LATTICE_CAP": "5000",
        "LOG_LEVEL": "DEBUG",
    })
    def test_settings_from_environment(self):
        """Test loading settings from environment variables."""
        settings = Settings()
        assert settings.resolv_threads == 8
        assert settings.lattice_cap == 5000
        assert settings.log_level == "DEBUG"

    @patch.dict(os.environ, {"resolv_threads": "3"})
    def test_case_insensitive_environment(self):
        """Test that environment variable names are case insensitive."""
        settings = Settings()
        assert settings.resolv_threads == 3

    def test_rejects_invalid_values(self):
        """Test that out-of-range values are rejected."""
        with pytest.raises(ValidationError):
            Settings(resolv_threads=0)
        with pytest.raises(ValidationError):
            Settings(default_reps=1)

    def test_get_settings_function(self):
        """Test get_settings function."""
        settings = get_settings()
        assert isinstance(settings, Settings)

    @patch.dict(os.environ, {"RESOLV_THREADS": "2"})
    def test_get_settings_picks_up_environment(self):
        """Test that get_settings reloads the environment on every call."""
        assert get_settings().resolv_threads == 2
