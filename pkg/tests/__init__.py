"""Tests for isoformal."""
