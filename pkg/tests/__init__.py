"""Test suite for the CIM-TPU simulator."""
