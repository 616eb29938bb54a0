"""Static resources: JSON schemas."""
