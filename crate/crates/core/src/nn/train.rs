use super::{pooling_pass, MergeStrategy, Network, NnError, PoolEvent, Sample};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub layer_sizes: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    /// A pooling pass runs after every epoch that is a multiple of this.
    pub pool_interval: usize,
    /// Merge threshold: pairs need cosine similarity strictly above it.
    pub tau: f64,
    pub merge: MergeStrategy,
    pub seed: u64,
    pub pooling_enabled: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            layer_sizes: vec![2, 8, 8, 2],
            learning_rate: 0.025,
            epochs: 50_000,
            pool_interval: 10_000,
            tau: 0.95,
            merge: MergeStrategy::FuzzyMin,
            seed: 42,
            pooling_enabled: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NnError> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(NnError::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.pool_interval == 0 {
            return Err(NnError::InvalidConfig("pool interval must be at least 1".into()));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(NnError::InvalidConfig(format!(
                "threshold must lie in (0, 1], got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    /// Loss at the start of the epoch, before its gradient step.
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub network: Network,
    pub epochs: Vec<EpochLog>,
    pub events: Vec<PoolEvent>,
}

/// Trains from a freshly initialized network for `config.epochs` epochs,
/// running a pooling pass after each epoch divisible by the pool interval
/// when pooling is enabled.
pub fn train(config: &TrainConfig, data: &[Sample]) -> Result<TrainOutcome, NnError> {
    config.validate()?;
    let mut network = Network::init(&config.layer_sizes, config.seed)?;
    let mut epochs = Vec::with_capacity(config.epochs);
    let mut events = Vec::new();
    for epoch in 1..=config.epochs {
        let loss = network.train_epoch(data, config.learning_rate)?;
        epochs.push(EpochLog { epoch, loss });
        if config.pooling_enabled && epoch % config.pool_interval == 0 {
            let (pooled, fired) = pooling_pass(&network, data, config.tau, config.merge, epoch)?;
            network = pooled;
            events.extend(fired);
        }
    }
    Ok(TrainOutcome {
        network,
        epochs,
        events,
    })
}
