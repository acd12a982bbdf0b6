"""Visual representation pretraining from unlabeled interaction video.

Pipeline: ingest frame corpora -> time-contrastive self-supervised
pretraining (plus autoencoder/VAE baselines) -> behavior-cloning
fine-tuning -> held-out action-MSE evaluation and ablation harnesses.
"""

__version__ = "0.1.0"
