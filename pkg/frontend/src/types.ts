export interface MetricsRecord {
    run_id: string;
    phase: string;
    iteration: number;
    episodes_total: number;
    env_steps_total: number;
    difficulty: number;
    win_rate_window: number;
    win_rate_eval: number | null;
    policy_loss: number;
    value_loss: number;
    entropy: number;
    clip_fraction: number;
    illegal_action_rate: number;
    wall_clock_ms: number;
    steps_per_second: number;
}

export type XAxis = 'episodes' | 'iterations' | 'wall-clock';
export type YAxis = 'win-rate' | 'difficulty' | 'loss';

export interface CurveSpec {
    inputs: string[];        // one metrics.jsonl path per seed
    x: XAxis;
    y: YAxis;
    smoothing: number;       // trailing moving-average window, >= 1
    output: string;          // image path (SVG)
    title?: string;
}

export interface ThresholdStats {
    dir?: string;
    reached: boolean;
    iteration: number | null;
    episodes_to_threshold: number | null;
    wall_clock_ms_to_threshold: number | null;
    total_episodes?: number;
}

export interface ComparisonReport {
    threshold: number;
    runs: { a: ThresholdStats; b: ThresholdStats };
    episodes_ratio: number | null;
    wall_clock_ratio: number | null;
}

export class EmptyMetricsError extends Error {}
export class UnknownAxisError extends Error {}
export class MalformedReportError extends Error {}
