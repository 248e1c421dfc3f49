"""Price-movement sentiment labeling, text features and classifiers for financial news."""
