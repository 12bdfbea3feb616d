"""Object-aware online action detection."""
