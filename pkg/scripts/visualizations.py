# scripts/visualizations.py
import pandas as pd
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import seaborn as sns
import sys
import os

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from config import DATA_PATHS
from scripts.experiments import QUANTITIES
from scripts.metrics import measure

# Set style for professional plots
plt.style.use('seaborn-v0_8-whitegrid')
sns.set_palette("husl")


class FlockVisualizations:
    def __init__(self, out_dir=DATA_PATHS['figures']):
        self.out_dir = out_dir

        # Boundary color mapping
        self.boundary_colors = {
            'variable_mass': '#2E86AB',  # Blue
            'regular': '#F18F01',  # Orange
        }

    def _save(self, fig, filename):
        os.makedirs(self.out_dir, exist_ok=True)
        path = os.path.join(self.out_dir, filename)
        fig.tight_layout()
        fig.savefig(path, dpi=300, bbox_inches='tight')
        plt.close(fig)
        print(f"✅ Saved: {filename}")
        return path

    def plot_last_agent_orbit(self, orbit, metrics=None, title=None, filename='last_agent_orbit.png'):
        """Plot 1: relative orbit y = z_N - z_0 with extrema and crossings marked"""
        t, y = orbit['t'].to_numpy(), orbit['y'].to_numpy()
        if metrics is None:
            metrics = measure(t, y)

        fig, ax = plt.subplots(figsize=(12, 5))
        ax.plot(t, y, color='#2E86AB', linewidth=1.5, label='$z_N - z_0$')
        ax.axhline(0, color='grey', linewidth=0.8)
        if metrics.t_ext:
            ax.scatter(metrics.t_ext, metrics.A, color='#A23B72', zorder=3, label='$A_k$')
        for k, t_cross in enumerate(metrics.T_cross):
            ax.axvline(t_cross, color='#F18F01', linestyle='--', linewidth=0.8,
                       label='$T_k$' if k == 0 else None)
        ax.set_title(title or 'Last Agent Relative to Leader', fontsize=14, fontweight='bold')
        ax.set_xlabel('Time', fontsize=12)
        ax.set_ylabel('Position relative to leader', fontsize=12)
        ax.legend()
        return self._save(fig, filename)

    def plot_agent_traces(self, traces, title=None, filename='agent_traces.png'):
        """Plot 2: every traced agent's position relative to the leader (time runs upward)"""
        fig, ax = plt.subplots(figsize=(8, 10))
        for _, agent in traces.groupby('agent_index'):
            ax.plot(agent['position_rel_leader'], agent['t'], color='black', linewidth=0.3, alpha=0.6)
        ax.set_title(title or 'Agent Orbits Relative to Leader', fontsize=14, fontweight='bold')
        ax.set_xlabel('Position relative to leader', fontsize=12)
        ax.set_ylabel('Time', fontsize=12)
        return self._save(fig, filename)

    def plot_convergence(self, study, filename='convergence.png'):
        """Plot 3: grid-median relative error against N on log-log axes, per boundary"""
        ok = study[study['status'] == 'ok']
        fig, axes = plt.subplots(1, len(QUANTITIES), figsize=(16, 5))

        for ax, (quantity, (err_col, _)) in zip(axes, QUANTITIES.items()):
            for boundary, color in self.boundary_colors.items():
                subset = ok[(ok['boundary'] == boundary) & (ok[err_col] > 0)]
                if subset.empty:
                    continue
                for _, point in subset.groupby(['rho_v1', 'g_v']):
                    ax.plot(point['N'], point[err_col], color=color, alpha=0.15, linewidth=0.8)
                median = subset.groupby('N')[err_col].median()
                ax.plot(median.index, median.values, color=color, linewidth=2.5,
                        marker='o', markersize=6, label=boundary)
            ax.set_xscale('log')
            ax.set_yscale('log')
            ax.set_title(f'Relative error of {quantity}', fontsize=12, fontweight='bold')
            ax.set_xlabel('N', fontsize=10)
            ax.legend(title='Boundary', fontsize=9)

        fig.suptitle('Convergence of Measured Transients to the Predictions', fontsize=16,
                     fontweight='bold', y=1.02)
        return self._save(fig, filename)

    def generate_all_visualizations(self, paths=None):
        """Plot whatever result files exist"""
        paths = paths or DATA_PATHS
        print("🚀 Generating Transient Visualizations...")
        print("=" * 60)
        saved = []

        if os.path.exists(paths['orbit']):
            orbit = pd.read_csv(paths['orbit'], comment='#')
            saved.append(self.plot_last_agent_orbit(orbit))
        if os.path.exists(paths['full_trace']):
            saved.append(self.plot_agent_traces(pd.read_csv(paths['full_trace'])))
        if os.path.isdir(paths['comparison']):
            for name in sorted(os.listdir(paths['comparison'])):
                if name.startswith('trace_') and name.endswith('.csv'):
                    traces = pd.read_csv(os.path.join(paths['comparison'], name))
                    stem = name[:-len('.csv')]
                    saved.append(self.plot_agent_traces(traces, title=stem, filename=f'{stem}.png'))
        if os.path.exists(paths['study']):
            saved.append(self.plot_convergence(pd.read_csv(paths['study'])))

        print("\n" + "=" * 60)
        if saved:
            print(f"✅ {len(saved)} visualizations generated")
            print(f"📁 Check the '{self.out_dir}/' folder for PNG files")
        else:
            print("❌ No result files found to plot")
        print("=" * 60)
        return saved


if __name__ == "__main__":
    viz = FlockVisualizations()
    viz.generate_all_visualizations()
