// DOM wiring: forms and slider on the left, summary and figures on the
// right, all driven by store subscriptions.

import { ApiClient } from "./api.js";
import { ExplorerController } from "./controller.js";
import { renderPlotSpec } from "./render.js";
import { ExplorerStore, type ExplorerState } from "./state.js";

const apiBase =
  new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8350";
const store = new ExplorerStore();
const controller = new ExplorerController(new ApiClient(apiBase), store);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function readFile(input: HTMLInputElement): Promise<string> {
  const file = input.files?.[0];
  if (!file) throw new Error("choose a file first");
  return file.text();
}

el<HTMLButtonElement>("upload-btn").addEventListener("click", () => {
  void (async () => {
    try {
      const effects = await readFile(el<HTMLInputElement>("effects-file"));
      const costs = await readFile(el<HTMLInputElement>("costs-file"));
      const kmax = Number(el<HTMLInputElement>("kmax-input").value) || undefined;
      await controller.uploadDataset(effects, costs, { kmax });
    } catch (err) {
      store.setFieldErrors({ upload: String(err instanceof Error ? err.message : err) });
    }
  })();
});

el<HTMLInputElement>("wtp-slider").addEventListener("input", (event) => {
  const value = Number((event.target as HTMLInputElement).value);
  el("wtp-value").textContent = String(value);
  controller.setWtp(value);
});

el<HTMLButtonElement>("riskav-btn").addEventListener("click", () => {
  const raw = el<HTMLInputElement>("riskav-input").value;
  const values = raw.split(",").map((s) => Number(s.trim()));
  void controller.submitRiskAversion(values);
});

el<HTMLButtonElement>("shares-btn").addEventListener("click", () => {
  const raw = el<HTMLInputElement>("shares-input").value;
  const values = raw.split(",").map((s) => Number(s.trim()));
  void controller.submitShares(values);
});

el<HTMLButtonElement>("multice-btn").addEventListener("click", () => {
  void controller.enableSimultaneous();
});

el<HTMLButtonElement>("evppi-btn").addEventListener("click", () => {
  const raw = el<HTMLInputElement>("evppi-input").value;
  const params = raw.split(",").map((s) => s.trim()).filter(Boolean);
  void controller.runEvppi(params, store.state.k);
});

function renderArmControls(state: ExplorerState): void {
  const digest = state.digest;
  const box = el("arm-controls");
  if (!digest) {
    box.innerHTML = "";
    return;
  }
  const rows = digest.labels
    .map((label, i) => {
      const arm = i + 1;
      const isRef = arm === digest.ref;
      const checked = digest.comparisons.includes(arm) ? "checked" : "";
      const disabled = isRef ? "disabled" : "";
      return (
        `<div class="arm-row"><label>` +
        `<input type="radio" name="ref" value="${arm}" ${isRef ? "checked" : ""}/> ref</label>` +
        `<label><input type="checkbox" class="comp" value="${arm}" ${checked} ${disabled}/> ` +
        `compare</label> <span>${label}</span></div>`
      );
    })
    .join("");
  box.innerHTML = rows;
  box.querySelectorAll<HTMLInputElement>("input[name=ref]").forEach((input) => {
    input.addEventListener("change", () => void controller.setReference(Number(input.value)));
  });
  box.querySelectorAll<HTMLInputElement>("input.comp").forEach((input) => {
    input.addEventListener("change", () => {
      const selected = Array.from(box.querySelectorAll<HTMLInputElement>("input.comp"))
        .filter((c) => c.checked)
        .map((c) => Number(c.value));
      void controller.setComparators(selected);
    });
  });
}

function renderEvppi(state: ExplorerState): void {
  const panel = el("evppi-result");
  const { status, result, error } = state.evppi;
  if (status === "idle") {
    panel.textContent = "";
    return;
  }
  if (status === "running") {
    panel.textContent = "EVPPI job running...";
    return;
  }
  if (status === "error") {
    panel.textContent = `EVPPI failed: ${error}`;
    return;
  }
  if (!result) return;
  const curve = {
    kind: "evppi",
    title: `EVPPI (${result.params.join(", ")})`,
    series: [
      {
        kind: "line" as const,
        label: "EVPI",
        x: result.k_grid,
        y: result.evpi,
        color: "#5c5c5c",
      },
      {
        kind: "line" as const,
        label: `EVPPI: ${result.params.join(", ")}`,
        x: result.k_grid,
        y: result.evppi,
        color: "#1b6ca8",
      },
    ],
    axes: {
      x_title: "Willingness to pay",
      y_title: "Value of information",
      x_range: [result.k_grid[0], result.k_grid[result.k_grid.length - 1]] as [number, number],
      y_range: [0, Math.max(...result.evpi, 1e-9) * 1.05] as [number, number],
    },
    annotations: [],
    legend: "top-left",
    categories: [],
    children: [],
  };
  let html = renderPlotSpec(curve);
  if (result.info_rank) {
    const ranked = result.info_rank;
    const bars = {
      kind: "info-rank",
      title: `Information value per parameter at k = ${result.info_rank_k}`,
      series: [
        {
          kind: "bars" as const,
          label: "share of EVPI",
          x: ranked.map((r) => r.proportion),
          y: ranked.map((_, i) => i),
          color: "#1b6ca8",
        },
      ],
      axes: {
        x_title: "Proportion of total EVPI",
        y_title: "",
        x_range: [0, Math.max(1, ...ranked.map((r) => r.proportion * 1.05))] as [number, number],
        y_range: [-0.5, ranked.length - 0.5] as [number, number],
      },
      annotations: [],
      legend: "none",
      categories: ranked.map((r) => r.param),
      children: [],
    };
    html += renderPlotSpec(bars);
  }
  panel.innerHTML = html;
}

store.subscribe((state) => {
  el("banner").textContent = state.banner ?? "";
  el("banner").style.display = state.banner ? "block" : "none";
  el("pending").style.display = state.pendingMutation ? "inline" : "none";

  const card = el("session-card");
  if (state.digest) {
    const d = state.digest;
    card.innerHTML =
      `<b>${d.n_sim}</b> simulations, <b>${d.n_int}</b> interventions ` +
      `(${d.labels.join(", ")})<br/>revision ${state.lastRevision}` +
      (d.advisories?.length ? `<br/><i>${d.advisories.join("; ")}</i>` : "");
    const slider = el<HTMLInputElement>("wtp-slider");
    slider.max = String(d.kmax);
    slider.step = String(d.kmax / (d.grid_points - 1));
  } else {
    card.textContent = "no dataset loaded";
  }

  el("summary-text").textContent = state.summary?.text ?? "";

  const plotsBox = el("plots");
  plotsBox.innerHTML = state.plotKinds
    .map((kind) => {
      const plot = state.plots[kind];
      return plot ? `<div class="plot">${renderPlotSpec(plot.spec)}</div>` : "";
    })
    .join("");

  for (const span of document.querySelectorAll<HTMLElement>("[data-error-for]")) {
    const field = span.dataset.errorFor ?? "";
    span.textContent = state.fieldErrors[field] ?? "";
  }

  renderArmControls(state);
  renderEvppi(state);
});
