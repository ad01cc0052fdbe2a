"""Tests for pcexplain"""
