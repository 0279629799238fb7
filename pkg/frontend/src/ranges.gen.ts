// Generated from ranges.json by scripts/gen-ranges.mjs; do not edit.
export interface SliderRange {
  min: number;
  max: number;
  step: number;
  label: string;
}

export const RANGES: Record<string, SliderRange> = {
  "depth_m": {
    "min": 0,
    "max": 5,
    "step": 0.01,
    "label": "Depth (m)"
  },
  "rolloff_m": {
    "min": 0,
    "max": 1,
    "step": 0.01,
    "label": "RollOff (m)"
  },
  "kernel_slider": {
    "min": 0,
    "max": 10,
    "step": 0.1,
    "label": "Smoothing"
  },
  "exposure_gain": {
    "min": 1,
    "max": 3,
    "step": 0.01,
    "label": "Exposure"
  },
  "gamma": {
    "min": 0.2,
    "max": 3,
    "step": 0.01,
    "label": "Gamma"
  },
  "gain_r": {
    "min": 0,
    "max": 4,
    "step": 0.01,
    "label": "Gain R"
  },
  "gain_g": {
    "min": 0,
    "max": 4,
    "step": 0.01,
    "label": "Gain G"
  },
  "gain_b": {
    "min": 0,
    "max": 4,
    "step": 0.01,
    "label": "Gain B"
  },
  "invalid_depth_alpha": {
    "min": 0,
    "max": 1,
    "step": 0.01,
    "label": "Invalid depth alpha"
  }
};
