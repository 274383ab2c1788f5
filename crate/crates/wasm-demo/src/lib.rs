//! WebAssembly bindings for the browser demo in `www/`.
//!
//! A [`Demo`] holds one draw of the 2-D toy data and the most recently
//! trained method. The page trains a method, paints its surface on a canvas
//! and tabulates its confidence-performance curve on held-out points.

use uq_core::datasets::{generate_toy, grid_2d, Dataset, ToyConfig, ToyMode};
use uq_core::evaluation::{
    confidence_performance, default_fractions, toy_surfaces, Method, MethodConfig, Origin, ScoredPredictions,
    TrainedMethod, TOY_BOUNDS,
};
use uq_core::numeric::SeededRng;
use wasm_bindgen::prelude::*;

const TEST_POINTS: usize = 1000;
const MAX_RESOLUTION: usize = 200;

#[wasm_bindgen]
pub struct Demo {
    rng: SeededRng,
    train: Dataset,
    val: Dataset,
    test: Dataset,
    trained: Option<TrainedMethod>,
}

#[wasm_bindgen]
impl Demo {
    /// `mode` is `"balanced"` or `"unbalanced"`.
    #[wasm_bindgen(constructor)]
    pub fn new(mode: &str, seed: u32) -> Result<Demo, String> {
        let mode = match mode {
            "balanced" => ToyMode::Balanced,
            "unbalanced" => ToyMode::Unbalanced,
            other => return Err(format!("unknown toy mode `{other}`")),
        };
        let rng = SeededRng::new(u64::from(seed));
        let cfg = ToyConfig::new(mode);
        let test_cfg = ToyConfig {
            n_train: TEST_POINTS,
            ..cfg.clone()
        };
        let data = rng.split("data");
        Ok(Demo {
            train: generate_toy(&cfg, &mut data.split("train")),
            val: generate_toy(&cfg, &mut data.split("val")),
            test: generate_toy(&test_cfg, &mut data.split("test")),
            rng,
            trained: None,
        })
    }

    /// Training points as interleaved `x1, x2, label` triples.
    #[wasm_bindgen(js_name = trainPoints)]
    pub fn train_points(&self) -> Vec<f64> {
        self.train
            .features()
            .iter_rows()
            .zip(self.train.labels())
            .flat_map(|(row, &y)| [row[0], row[1], f64::from(y)])
            .collect()
    }

    /// Trains `method` (e.g. `"nn-ensemble"`) and keeps it for the other calls.
    pub fn train(&mut self, method: &str, class_weighting: bool) -> Result<(), String> {
        let method: Method = method.parse().map_err(|e| format!("{e}"))?;
        let cfg = MethodConfig::toy().with_class_weighting(class_weighting);
        let trained = TrainedMethod::train(method, &self.train, &self.val, &cfg, &self.rng.split("train"))
            .map_err(|e| e.to_string())?;
        self.trained = Some(trained);
        Ok(())
    }

    /// Row-major `resolution × resolution` values over the plot window.
    /// `layer` is `"probability"`, `"entropy"` or `"novelty"` (VAE only).
    pub fn surface(&self, resolution: usize, layer: &str) -> Result<Vec<f64>, String> {
        let trained = self.trained.as_ref().ok_or("no method trained yet")?;
        if resolution > MAX_RESOLUTION {
            return Err(format!("resolution is capped at {MAX_RESOLUTION}"));
        }
        let grid = grid_2d(TOY_BOUNDS, resolution).map_err(|e| e.to_string())?;
        let points = toy_surfaces(trained, &grid, &self.rng.split("surfaces")).map_err(|e| e.to_string())?;
        points
            .iter()
            .map(|p| match layer {
                "probability" => Ok(p.probability),
                "entropy" => Ok(p.entropy),
                "novelty" => p.novelty.ok_or_else(|| format!("{} has no novelty score", trained.method)),
                other => Err(format!("unknown layer `{other}`")),
            })
            .collect()
    }

    /// Confidence-performance curve on the held-out points, as a JSON array.
    pub fn curve(&self) -> Result<String, String> {
        let trained = self.trained.as_ref().ok_or("no method trained yet")?;
        let scores = trained
            .score(self.test.features(), &self.rng.split("score"))
            .map_err(|e| e.to_string())?;
        let sp = ScoredPredictions::new(
            trained.method,
            Origin::Test,
            scores.probabilities,
            scores.uncertainty,
            self.test.labels().to_vec(),
        )
        .map_err(|e| e.to_string())?;
        let points = confidence_performance(&sp, &default_fractions()).map_err(|e| e.to_string())?;
        serde_json::to_string(&points).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_has_one_value_per_cell() {
        let mut demo = Demo::new("balanced", 3).unwrap();
        assert_eq!(demo.train_points().len(), 3 * 200);
        assert!(demo.surface(10, "probability").is_err());
        demo.train("single-nn", false).unwrap();
        let p = demo.surface(20, "probability").unwrap();
        assert_eq!(p.len(), 400);
        assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
        let h = demo.surface(20, "entropy").unwrap();
        assert!(h.iter().all(|v| (0.0..=std::f64::consts::LN_2 + 1e-12).contains(v)));
        assert!(demo.surface(20, "novelty").is_err());
        assert!(demo.surface(20, "height").is_err());
    }

    #[test]
    fn vae_exposes_novelty() {
        let mut demo = Demo::new("balanced", 3).unwrap();
        demo.train("vae", false).unwrap();
        let n = demo.surface(8, "novelty").unwrap();
        assert_eq!(n.len(), 64);
        // corners of the window are farther from the data than the centre
        let corner = n[0];
        let centre = n[3 * 8 + 3];
        assert!(corner > centre);
    }

    #[test]
    fn curve_is_json_with_eleven_points() {
        let mut demo = Demo::new("unbalanced", 1).unwrap();
        demo.train("nn-ensemble", true).unwrap();
        let points: Vec<serde_json::Value> = serde_json::from_str(&demo.curve().unwrap()).unwrap();
        assert_eq!(points.len(), 11);
        assert_eq!(points[10]["included"], TEST_POINTS);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(Demo::new("skewed", 0).is_err());
        let mut demo = Demo::new("balanced", 0).unwrap();
        assert!(demo.train("forest", false).is_err());
        assert!(demo.curve().is_err());
    }
}
