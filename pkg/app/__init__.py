"""qfrag: error-prediction-driven quantum circuit fragmentation."""
