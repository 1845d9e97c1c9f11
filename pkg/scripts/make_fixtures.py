#!/usr/bin/env python3
"""Build the bundled fixture corpus and every companion fixture file.

Deterministic end to end: running this script twice produces identical
fixtures. It writes into fixtures/ at the repo root:

  corpus.jsonl                raw documents (papers, code, tdocs, wiki, ...)
  lexicon.tsv                 telecom keyword lexicon
  excluded_abbreviations.txt  noisy abbreviations disabled for matching
  pipeline.yaml               pipeline config wired to the files above
  mock_llm/                   fingerprint-keyed mock chat responses
  mcq_responses.jsonl         graded-run fixture for the score stage
  equation_predictions.jsonl  equation-infilling predictions fixture
  tdoc_predictions.jsonl      classification predictions fixture

The mock LLM fixtures are keyed by request fingerprint, so this script
re-renders the exact prompts the forge stage will send and must be rerun
whenever templates or MCQ selection logic change.
"""

from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))

from telebench.clients import CompletionRequest, request_fingerprint  # noqa: E402
from telebench.config import (  # noqa: E402
    DedupSettings,
    FilterSettings,
    ForgeSettings,
    PipelineConfig,
    ProviderSettings,
    ScoringSettings,
)
from telebench.forge.items import McqItem, format_options  # noqa: E402
from telebench.forge.mcq import (  # noqa: E402
    candidate_to_item,
    format_mcq_for_validation,
    parse_generator_candidates,
)
from telebench.forge.prompts import render_prompt_template  # noqa: E402
from telebench.ingest import Document  # noqa: E402
from telebench.jsonl import iter_jsonl, write_jsonl  # noqa: E402
from telebench.pipeline import (  # noqa: E402
    MCQ_SOURCE_WORD_LIMIT,
    PipelinePaths,
    run_pipeline,
    stage_dedup,
    stage_filter,
    stage_ingest,
)

FIXTURES = REPO_ROOT / "fixtures"
GEN_MODEL = "gen-mock"
VAL_MODEL = "val-mock"

# ---------------------------------------------------------------------------
# lexicon
# ---------------------------------------------------------------------------

LEXICON_LINES = """\
# Telecom keyword lexicon: term <TAB> abbreviations <TAB> criteria flags
5G\t\tdomain-specificity,frequency
MIMO\tMU-MIMO\tdomain-specificity,distinctiveness
beamforming\t\tdistinctiveness
LTE\t\tfrequency
VoLTE\t\tclarity
New Radio\tNR\ttimeliness
Downlink\tDL
Uplink\tUL
OFDM
OFDMA
handover\t\tdistinctiveness
roaming\t\tfrequency
broadband\t\tfrequency
backhaul
mmWave\t\ttimeliness
URLLC\t\ttimeliness
eMBB\t\ttimeliness
network slicing\t\ttimeliness
spectrum allocation\t\tdistinctiveness
fiber optic\t\tdistinctiveness
channel estimation
path loss
SINR
HARQ
RRC
PDCP
gNB
3GPP\t\tauthority
IEEE 802.11\t\tauthority
E.164\t\tauthority
Wi-Fi 6\t\tclarity
SD-WAN\t\tclarity
IPv6
base station
subcarrier
modulation and coding scheme\tMCS
scheduling request
random access
beam management
carrier aggregation
sidelink
V2X
QoS flow
precoding
Service Access Point\tSAP
"""

EXCLUDED_ABBREVIATIONS = "DL\nSAP\n"

# ---------------------------------------------------------------------------
# papers (LaTeX-ish sources with display equations)
# ---------------------------------------------------------------------------

PAPERS = {
    "p01": r"""Uplink power control for 5G networks relies on accurate path loss estimates.
We consider a single cell where the gNB schedules one user per subcarrier.
The received uplink signal is modeled as
\begin{equation}
y = \sqrt{P} h x + n, \quad n \sim \mathcal{CN}(0, \sigma^2)
\end{equation}
where $P$ is the transmit power and $h$ the channel coefficient. Averaging over
fading, the spectral efficiency of the link becomes
\begin{align}
R = \log_2 \left( 1 + \frac{P |h|^2}{\sigma^2} \right)
\end{align}
which the scheduler maximizes subject to a power budget. The SINR target follows from
\[ \gamma = \frac{P |h|^2}{\sigma^2 + I} \]
with $I$ the inter-cell interference. Details are online at https://example.org/power-control notes.

A closing remark on HARQ retransmissions completes the uplink discussion.

References
[1] A classic textbook on wireless communications.
""",
    "p02": r"""Beamforming with massive MIMO arrays sharpens the downlink beam toward each user.
Let $M$ denote the antenna count at the base station. The precoding vector obeys
\begin{equation}
w = \frac{h^{H}}{\| h \|}
\end{equation}
so the array gain grows with the aperture. The resulting SINR satisfies
\begin{eqnarray}
\gamma_k = \frac{P_k |h_k^{H} w_k|^2}{\sigma^2 + \sum_{j \neq k} P_j |h_k^{H} w_j|^2}
\end{eqnarray}
for user $k$. Channel estimation errors shrink the beamforming gain in practice.

References
[1] Array processing notes.
""",
    "p03": r"""Network slicing partitions one physical 5G deployment into isolated logical networks.
For URLLC slices the queueing delay dominates, and we bound the tail probability by
\begin{equation}
\Pr(W \geq d) \leq \exp(-\theta d) \cdot \mathbb{E}[\exp(\theta W)]
\end{equation}
using a Chernoff argument with parameter $\theta$. The eMBB slice instead maximizes the sum rate
\begin{align}
S = \sum_{k=1}^{K} \alpha_k \log_2 ( 1 + \gamma_k )
\end{align}
with slice weights $\alpha_k$ chosen by the operator. Carrier aggregation adds capacity when needed.

References
[1] Slicing survey.
""",
    "p04": r"""Channel estimation with pilot symbols underpins coherent OFDM reception.
Stacking the pilots, the least-squares estimate of the channel reads
\begin{equation}
\widehat{h} = ( X^{H} X )^{-1} X^{H} y
\end{equation}
and its mean-squared error decays with the pilot power. With a Gaussian prior the
LMMSE filter becomes
\begin{align}
\widehat{h}_{\mathrm{lmmse}} = R_h X^{H} ( X R_h X^{H} + \sigma^2 I )^{-1} y
\end{align}
where $R_h$ is the channel covariance. Subcarrier spacing controls the pilot overhead.

References
[1] Estimation theory notes.
""",
    "p05": r"""Random access in LTE and NR uses a contention-based preamble exchange with the gNB.
With $U$ users and $K$ preambles, the collision probability per attempt is
\begin{equation}
p_c = 1 - \left( 1 - \frac{1}{K} \right)^{U - 1}
\end{equation}
which drives the backoff design. The mean access delay after $m$ retries obeys
\[ \mathbb{E}[D] = \sum_{i=0}^{m} p_c^{i} (1 - p_c) \cdot d_i \]
with slot-dependent delays $d_i$. HARQ applies only after the grant, and a
scheduling request rides on the uplink control channel.

References
[1] Random access analysis.
""",
    "p06": r"""Millimeter-wave links suffer severe path loss, which beam management must offset.
The free-space attenuation at distance $r$ and wavelength $\lambda$ is
\begin{equation}
L(r) = \left( \frac{4 \pi r}{\lambda} \right)^{2}
\end{equation}
so mmWave systems lean on directional antennas. Blockage adds a shadowing margin
\begin{align}
L_{\mathrm{tot}} = L(r) + X_{\mathrm{shadow}}, \quad X_{\mathrm{shadow}} \sim \mathcal{N}(0, \sigma_s^2)
\end{align}
in the logarithmic domain. Beam sweeping periodicity trades latency for overhead.

References
[1] mmWave propagation measurements.
""",
    "p07": r"""Sidelink V2X communication lets vehicles exchange safety messages without the base station.
The age of information of a periodic broadcast with period $T$ and delay $\Delta$ satisfies
\begin{equation}
\bar{A} = \frac{T}{2} + \Delta
\end{equation}
under lossless reception. With packet loss probability $p$ the effective age inflates to
\begin{align}
\bar{A}_p = \frac{T}{2} + \Delta + \frac{p T}{1 - p}
\end{align}
revealing the retransmission penalty. Resource pools are preconfigured by the operator.

References
[1] V2X age analysis.
""",
    "p08": r"""Carrier aggregation combines component carriers to widen the effective bandwidth.
The aggregate throughput over $C$ carriers follows
\begin{equation}
T_{\mathrm{agg}} = \sum_{c=1}^{C} B_c \log_2 ( 1 + \gamma_c )
\end{equation}
with per-carrier bandwidths $B_c$. Scheduling couples carriers through the shared power budget
\[ \sum_{c=1}^{C} P_c \leq P_{\mathrm{max}} \]
which a water-filling allocation solves. The modulation and coding scheme adapts per carrier.

References
[1] Aggregation field trials.
""",
}

# ---------------------------------------------------------------------------
# code documents
# ---------------------------------------------------------------------------

CODE_DOCS = {
    "c01": (
        "python",
        "sinr_map.py",
        '''"""Per-subcarrier SINR computation for an OFDM downlink."""

import math


def sinr_per_subcarrier(signal_power, interference, noise_floor):
    """Return linear SINR values, one per subcarrier."""
    sinr = []
    for p, i in zip(signal_power, interference):
        sinr.append(p / (i + noise_floor))
    return sinr


def spectral_efficiency(sinr_values):
    """Shannon efficiency per subcarrier for the current SINR map."""
    return [math.log2(1.0 + s) for s in sinr_values]


def average_efficiency(sinr_values):
    eff = spectral_efficiency(sinr_values)
    return sum(eff) / len(eff)
''',
    ),
    "c02": (
        "python",
        "harq_tracker.py",
        '''"""HARQ process bookkeeping for an LTE uplink scheduler."""

MAX_RETRANSMISSIONS = 4


class HarqProcess:
    def __init__(self, process_id):
        self.process_id = process_id
        self.attempts = 0
        self.acked = False

    def on_nack(self):
        self.attempts += 1
        return self.attempts <= MAX_RETRANSMISSIONS

    def on_ack(self):
        self.acked = True
        self.attempts = 0


def pending_processes(processes):
    """Processes still waiting for an ACK from the gNB."""
    return [p for p in processes if not p.acked]
''',
    ),
    "c03": (
        "python",
        "mac_parser.py",
        '''"""Extract MAC addresses and frame types from IEEE 802.11 headers.

Handles classic captures as well as 802.11ax (Wi-Fi 6) data frames.
"""

FRAME_TYPES = {0: "management", 1: "control", 2: "data"}


def parse_frame_control(first_two_bytes):
    """Decode the 802.11 frame control field."""
    value = int.from_bytes(first_two_bytes, "little")
    frame_type = (value >> 2) & 0b11
    subtype = (value >> 4) & 0b1111
    return FRAME_TYPES.get(frame_type, "reserved"), subtype


def format_mac(raw):
    """Render six raw bytes as a colon-separated MAC address."""
    return ":".join(f"{b:02x}" for b in raw)


def extract_bssid(frame):
    """BSSID sits in the third address field of a data frame."""
    offset = 16
    return format_mac(frame[offset:offset + 6])
''',
    ),
    "c04": (
        "c",
        "tx_power.c",
        """/* Transmit power reporting for a 5G base station radio driver. */
#include <stdio.h>

#define TX_POWER_MAX_DBM 23
#define TX_POWER_MIN_DBM -40

struct tx_power_report {
    int value_dbm;
    int fixed;
    int disabled;
};

int clamp_tx_power(int requested_dbm)
{
    if (requested_dbm > TX_POWER_MAX_DBM)
        return TX_POWER_MAX_DBM;
    if (requested_dbm < TX_POWER_MIN_DBM)
        return TX_POWER_MIN_DBM;
    return requested_dbm;
}

void fill_report(struct tx_power_report *report, int dbm, int rf_kill)
{
    report->value_dbm = clamp_tx_power(dbm);
    report->fixed = 1;
    report->disabled = rf_kill ? 1 : 0;
}
""",
    ),
    "c05": (
        "c",
        "crc16.c",
        """/* CCITT CRC-16 guarding HARQ feedback on the LTE radio link. */
#include <stdint.h>

#define CRC16_POLY 0x1021
#define CRC16_INIT 0xFFFF

uint16_t crc16_step(uint16_t crc, uint8_t byte)
{
    crc ^= (uint16_t)byte << 8;
    for (int bit = 0; bit < 8; bit++) {
        if (crc & 0x8000)
            crc = (crc << 1) ^ CRC16_POLY;
        else
            crc <<= 1;
    }
    return crc;
}

uint16_t crc16(const uint8_t *data, int length)
{
    uint16_t crc = CRC16_INIT;
    for (int i = 0; i < length; i++)
        crc = crc16_step(crc, data[i]);
    return crc;
}
""",
    ),
    "c06": (
        "matlab",
        "pathloss.m",
        """% Log-distance path loss with shadowing for mmWave link budgets.
function loss_db = pathloss(distance_m, exponent, sigma_db, seed)
    % Reference loss at one meter for a 3.5 GHz carrier.
    reference_db = 32.4;
    rng(seed);
    shadowing = sigma_db * randn(size(distance_m));
    loss_db = reference_db + 10 * exponent * log10(distance_m) + shadowing;
    loss_db = max(loss_db, reference_db);
end

function margin = fade_margin(loss_db, budget_db)
    % Remaining budget after path loss; negative means outage.
    margin = budget_db - loss_db;
end
""",
    ),
}

# ---------------------------------------------------------------------------
# tdocs, wiki, stackexchange, rejects
# ---------------------------------------------------------------------------


def _tdoc_body(topic_sentences: list[str]) -> str:
    paragraphs = "".join(f"<p>{s}</p>" for s in topic_sentences)
    return (
        "<html><body>"
        + paragraphs
        + "<p>Page 2 of 9</p>"
        + "<p>References</p><p>[1] Prior contribution.</p>"
        + "</body></html>"
    )


# Long shared body so the revision below lands above the 0.85 near-dup
# threshold (one extra sentence over ~150 shared words).
_T03_SENTENCES = [
    "The architecture study evaluates network slicing support for roaming subscribers.",
    "Each QoS flow maps to one slice instance selected at session establishment.",
    "The solution reuses the existing 5G service-based interfaces without new network functions.",
    "Charging interactions are out of scope and handled by SA5.",
    "Broadband access through wireline convergence follows the same slice selection logic.",
    "Slice selection assistance information travels from the device through the access network to the core.",
    "The visited network validates the requested slice against the roaming agreement before admission.",
    "When the requested slice is unavailable the session falls back to the default slice of the subscription.",
    "Operational measurements feed the slice admission thresholds through the management plane.",
    "Interworking with the earlier packet core follows the mapping table agreed in the previous meeting.",
    "The study concludes that no additional reference points are required for the roaming case.",
]


TDOCS = {
    "t01": (
        "RAN1",
        _tdoc_body(
            [
                "This contribution discusses subcarrier spacing candidates for the 5G New Radio uplink.",
                "Larger spacing shortens the symbol and eases phase noise at mmWave carriers.",
                "The proposal keeps the PRACH preamble formats aligned with the agreed random access design.",
                "Simulation assumptions follow the agreed evaluation methodology for path loss and SINR.",
                "A companion contribution addresses the HARQ timing when carrier aggregation is configured.",
            ]
        ),
    ),
    "t02": (
        "RAN2",
        _tdoc_body(
            [
                "This document proposes RRC signalling to configure beam management measurement reports.",
                "The UE reports the strongest beams per cell to assist handover decisions by the gNB.",
                "A prohibit timer avoids excessive scheduling request transmissions on the uplink.",
                "The PDCP reordering window is unchanged by this proposal.",
                "Stage-3 text for the RRC reconfiguration message is attached for review.",
            ]
        ),
    ),
    "t03": (
        "SA2",
        _tdoc_body(_T03_SENTENCES),
    ),
    "t05": (
        "SA5",
        _tdoc_body(
            [
                "This contribution refines charging data records for VoLTE roaming scenarios.",
                "The charging trigger aligns with QoS flow establishment and release events.",
                "Management services expose slice usage counters for the eMBB and URLLC slices.",
                "An E.164 number normalization step precedes record correlation.",
                "The proposal updates the stage-2 charging architecture figures accordingly.",
            ]
        ),
    ),
    "t06": (
        "CT1",
        _tdoc_body(
            [
                "The CR-free discussion paper reviews IPv6 address configuration during initial attach.",
                "The UE requests an IPv6 prefix through router solicitation after the default bearer activates.",
                "Interaction with roaming partners requires consistent APN configuration records.",
                "The procedure text clarifies the SIP registration retry timers for VoLTE devices.",
                "Backward compatibility with earlier releases is preserved by capability signalling.",
            ]
        ),
    ),
    "t07": (
        "CT4",
        _tdoc_body(
            [
                "This contribution defines the diameter routing updates for inter-operator roaming hubs.",
                "An E.164 based resolution selects the home subscriber server per subscriber range.",
                "Failure handling retries the alternate peer before the request times out.",
                "The backhaul capacity assumptions match the agreed dimensioning guidance.",
                "Stage-3 ABNF changes are listed in the annex of this document.",
            ]
        ),
    ),
}

# near-duplicate of t03: one added sentence (longer revision wins dedup)
TDOC_NEAR_DUP = (
    "SA2",
    _tdoc_body(
        _T03_SENTENCES
        + ["This revision adds the evaluation summary agreed over the email discussion."]
    ),
)

WIKI_1 = (
    "<h1>Handover</h1>"
    "<p>In cellular networks a handover transfers an ongoing call or data session from one "
    "base station to another as the user moves. LTE and 5G New Radio perform hard and "
    "conditional handovers controlled through RRC signalling.</p>"
    "<table><tr><th>Generation</th><th>Latency</th></tr><tr><td>4G</td><td>50 ms</td></tr></table>"
    "<p>Measurement reports include reference signal received power per beam, enabling "
    "beam management at mmWave frequencies. See https://wiki.example.org/handover for history.</p>"
)

WIKI_2 = (
    "<h1>Spectrum allocation</h1>"
    "<p>Spectrum allocation assigns frequency bands to services. National regulators auction "
    "licensed bands for 5G, while Wi-Fi 6 rides on unlicensed spectrum. Carrier aggregation "
    "lets an operator combine scattered allocations into one broadband pipe.</p>"
    "<p>Refarming moves legacy LTE spectrum to New Radio as traffic migrates.</p>"
)

STACKEXCHANGE_1 = (
    "<p><b>Q:</b> Why does OFDM use a cyclic prefix?</p>"
    "<p><b>A:</b> The cyclic prefix turns linear convolution with the channel into circular "
    "convolution, so each subcarrier sees a flat channel and equalization becomes a single "
    "complex multiplication. It also absorbs delay spread, protecting against inter-symbol "
    "interference at the cost of overhead. Channel estimation uses pilots spread across "
    "subcarriers.</p>"
)

IRRELEVANT_1 = (
    "<p>To cook a proper carbonara, whisk eggs with pecorino and plenty of black pepper. "
    "Fry guanciale until crisp, fold in the drained spaghetti, and finish off the heat so "
    "the sauce stays silky. Never add cream. Serve immediately with extra cheese.</p>"
)

CR_DOC = (
    "<p>Reason for change: corrects the uplink power control formula for 5G carrier "
    "aggregation. Summary of change: the SINR backoff now applies per component carrier.</p>"
)


def build_corpus() -> list[dict]:
    docs: list[dict] = []
    for doc_id, text in PAPERS.items():
        docs.append(
            {
                "id": doc_id,
                "source": "paper",
                "text": text,
                "meta": {"filename": f"{doc_id}.tex"},
            }
        )
    for doc_id, (language, filename, text) in CODE_DOCS.items():
        docs.append(
            {
                "id": doc_id,
                "source": "code",
                "text": text,
                "meta": {"filename": filename, "language": language},
            }
        )
    for doc_id, (wg, text) in TDOCS.items():
        docs.append(
            {
                "id": doc_id,
                "source": "standard-3gpp",
                "text": text,
                "meta": {"filename": f"{doc_id}.docx", "working_group": wg},
            }
        )
    wg, text = TDOC_NEAR_DUP
    docs.append(
        {
            "id": "t03-rev1",
            "source": "standard-3gpp",
            "text": text,
            "meta": {"filename": "t03-rev1.docx", "working_group": wg},
        }
    )
    docs.append({"id": "w01", "source": "wiki", "text": WIKI_1, "meta": {"filename": "handover.html"}})
    docs.append(
        {"id": "w02", "source": "wiki", "text": WIKI_2, "meta": {"filename": "spectrum.html"}}
    )
    # exact duplicate of w01 modulo case and spacing (URL casing untouched:
    # only lowercase http/https tokens count as URLs)
    docs.append(
        {
            "id": "w01-copy",
            "source": "wiki",
            "text": WIKI_1.replace("beam management", "BEAM MANAGEMENT").replace(" fo", "  fo"),
            "meta": {"filename": "handover_mirror.html"},
        }
    )
    docs.append(
        {"id": "s01", "source": "stackexchange", "text": STACKEXCHANGE_1, "meta": {}}
    )
    docs.append({"id": "x01", "source": "wiki", "text": IRRELEVANT_1, "meta": {"filename": "carbonara.html"}})
    docs.append(
        {
            "id": "x02",
            "source": "standard-3gpp",
            "text": CR_DOC,
            "meta": {"filename": "R1-2304_CR_38213.docx", "working_group": "RAN1"},
        }
    )
    return docs


# ---------------------------------------------------------------------------
# MCQ mock fixtures
# ---------------------------------------------------------------------------


def _mcq(question: str, options: list[str], answer: int, explanation: str) -> McqItem:
    return McqItem(
        question=question,
        options=options,
        answer_index=answer,
        explanation=explanation,
        category="research-publications",
    )


def _render_candidate(item: McqItem, answer_override: str | None = None) -> str:
    lines = [f"Question: {item.question}"]
    lines.append(format_options(item.options))
    lines.append(f"Answer: {answer_override or f'Option {item.answer_index}'}")
    lines.append(f"Explanation: {item.explanation}")
    return "\n".join(lines)


# Per selected document: (item, validator_reply, generator answer override).
# validator_reply None means the candidate never reaches validation.
MCQ_SCRIPT = {
    0: [
        (
            _mcq(
                "Which quantity does uplink power control try to stabilize at the receiver?",
                ["The signal-to-interference-plus-noise ratio", "The subcarrier spacing", "The cell identity"],
                1,
                "Power control compensates path loss to hold the target ratio.",
            ),
            "Option 1",
            None,
        ),
        (
            _mcq(
                "Which mechanism retransmits uplink transport blocks after a decoding failure?",
                ["Hybrid automatic repeat request", "Random access", "Carrier aggregation"],
                1,
                "Hybrid automatic repeat request combines retransmissions at the receiver.",
            ),
            "Option 2",  # validator disagrees -> removed
            None,
        ),
        (
            _mcq(
                "What does the proposed scheme in this paper improve?",
                ["Throughput", "Latency"],
                1,
                "Described in the text.",
            ),
            None,  # dropped for banned tokens before validation
            None,
        ),
    ],
    1: [
        (
            _mcq(
                "What limits the beamforming gain of a massive antenna array in practice?",
                ["Channel estimation errors", "The cyclic prefix length", "The core network latency"],
                1,
                "Imperfect channel knowledge misaligns the beam.",
            ),
            "Option 1",
            None,
        ),
        (
            _mcq(
                "How many technical specification groups exist?",
                ["Three", "Nine"],
                1,
                "There are three groups.",
            ),
            None,
            "Option 9",  # malformed answer -> parse drop
        ),
    ],
    2: [
        (
            _mcq(
                "Which service category targets very low latency with high reliability?",
                ["Ultra-reliable low-latency communication", "Enhanced mobile broadband", "Massive machine-type communication"],
                1,
                "That category trades capacity for deterministic delay.",
            ),
            "Option 1",
            None,
        ),
        (
            _mcq(
                "Which technique combines several component carriers into one wider channel?",
                ["Carrier aggregation", "Network slicing"],
                1,
                "Aggregating carriers widens the usable bandwidth.",
            ),
            "Option 1",
            None,
        ),
    ],
}


def write_mock_llm(selected_texts: list[str], mock_dir: Path) -> None:
    if mock_dir.exists():
        shutil.rmtree(mock_dir)
    mock_dir.mkdir(parents=True)
    for doc_index, text in enumerate(selected_texts):
        script = MCQ_SCRIPT[doc_index]
        generator_output = "\n\n".join(
            _render_candidate(item, override) for item, _, override in script
        )
        # sanity: the generated block must parse back to the same candidates
        parsed = parse_generator_candidates(generator_output)
        assert len(parsed) == len(script), "generator fixture does not round-trip"
        for candidate, (item, _, override) in zip(parsed, script):
            if override is None:
                rebuilt, reason = candidate_to_item(candidate, "research-publications")
                assert rebuilt is not None, f"fixture candidate invalid: {reason}"
                assert rebuilt.question == item.question

        gen_prompt = render_prompt_template("mcq-generate", {"text": text})
        gen_req = CompletionRequest(model_id=GEN_MODEL, prompt=gen_prompt)
        (mock_dir / f"{request_fingerprint(gen_req)}.txt").write_text(
            generator_output, encoding="utf-8"
        )

        for item, validator_reply, override in script:
            if validator_reply is None:
                continue
            val_prompt = render_prompt_template(
                "mcq-validate",
                {"text": text, "question": format_mcq_for_validation(item)},
            )
            val_req = CompletionRequest(model_id=VAL_MODEL, prompt=val_prompt)
            (mock_dir / f"{request_fingerprint(val_req)}.txt").write_text(
                validator_reply, encoding="utf-8"
            )


# ---------------------------------------------------------------------------
# pipeline config
# ---------------------------------------------------------------------------

PIPELINE_YAML = """\
# Fixture pipeline: every stage wired to the bundled fixture files.
corpus_path: corpus.jsonl
lexicon_path: lexicon.tsv
lexicon_exclusions: excluded_abbreviations.txt
output_dir: ../out/fixture_run
seed: 42
stages: [ingest, filter, dedup, forge, score]
segment_targets: [64, 128]

filter:
  min_unique_keywords: 2
  min_density: 0.3

dedup:
  shingle_words: 5
  num_permutations: 128
  jaccard_threshold: 0.85
  seed: 17

forge:
  seed: 7
  masked_equations: true
  max_equation_items_per_doc: 3
  code_infill: true
  tdoc: true
  per_wg_quota: 4
  mcq: true
  mcq_max_docs: 3

generator:
  kind: mock
  model_id: gen-mock
  fixtures_dir: mock_llm

validator:
  kind: mock
  model_id: val-mock
  fixtures_dir: mock_llm

embedding:
  kind: stub
  dimension: 64

scoring:
  mcq_responses: mcq_responses.jsonl
  equation_predictions: equation_predictions.jsonl
  tdoc_predictions: tdoc_predictions.jsonl

review:
  host: 127.0.0.1
  port: 8321
  static_dir: ../frontend/public
"""


def _staging_config(work_dir: Path) -> PipelineConfig:
    return PipelineConfig(
        corpus_path=str(FIXTURES / "corpus.jsonl"),
        lexicon_path=str(FIXTURES / "lexicon.tsv"),
        lexicon_exclusions=str(FIXTURES / "excluded_abbreviations.txt"),
        output_dir=str(work_dir),
        seed=42,
        segment_targets=[64, 128],
        filter=FilterSettings(min_unique_keywords=2, min_density=0.3),
        dedup=DedupSettings(shingle_words=5, num_permutations=128, jaccard_threshold=0.85, seed=17),
        forge=ForgeSettings(
            seed=7,
            masked_equations=True,
            max_equation_items_per_doc=3,
            code_infill=True,
            tdoc=True,
            per_wg_quota=4,
            mcq=True,
            mcq_max_docs=3,
        ),
        generator=ProviderSettings(kind="mock", model_id=GEN_MODEL, fixtures_dir=str(FIXTURES / "mock_llm")),
        validator=ProviderSettings(kind="mock", model_id=VAL_MODEL, fixtures_dir=str(FIXTURES / "mock_llm")),
        scoring=ScoringSettings(
            mcq_responses=str(FIXTURES / "mcq_responses.jsonl"),
            equation_predictions=str(FIXTURES / "equation_predictions.jsonl"),
            tdoc_predictions=str(FIXTURES / "tdoc_predictions.jsonl"),
        ),
        base_dir=REPO_ROOT,
    )


def selected_mcq_texts(config: PipelineConfig, paths: PipelinePaths) -> list[str]:
    """Replicates the forge stage's MCQ document selection."""
    docs = [Document.from_record(r) for r in iter_jsonl(paths.deduped)]
    for doc in docs:
        doc.cleaned = doc.raw
    eligible = [d for d in docs if d.source in config.forge.mcq_category_by_source]
    eligible = eligible[: config.forge.mcq_max_docs]
    return [" ".join(d.cleaned.split()[:MCQ_SOURCE_WORD_LIMIT]) for d in eligible]


def write_response_fixtures(items_path: Path) -> None:
    items = list(iter_jsonl(items_path))

    mcq_ids = [e["item_id"] for e in items if e["kind"] == "mcq"]
    mcq_items = {e["item_id"]: e for e in items if e["kind"] == "mcq"}
    responses = []
    for i, item_id in enumerate(mcq_ids):
        if i == len(mcq_ids) - 1:
            continue  # one missing response, graded incorrect
        answer = mcq_items[item_id]["answer_index"]
        if i == 1:
            options = mcq_items[item_id]["options"]
            answer = answer % len(options) + 1  # deliberately wrong
        responses.append({"item_id": item_id, "response": f"Option {answer}"})
    write_jsonl(FIXTURES / "mcq_responses.jsonl", responses)

    predictions = []
    equations = [e for e in items if e["kind"] == "masked-equation"]
    for i, envelope in enumerate(equations):
        truth = envelope["ground_truth_equation"]
        if i % 3 == 0:
            prediction = truth  # exact reproduction
        elif i % 3 == 1:
            prediction = truth.replace("=", "= 2 +", 1)  # perturbed
        else:
            prediction = ""  # empty answer, scores zero by construction
        predictions.append({"item_id": envelope["item_id"], "prediction": prediction})
    write_jsonl(FIXTURES / "equation_predictions.jsonl", predictions)

    tdoc_predictions = []
    tdocs = [e for e in items if e["kind"] == "tdoc-class"]
    for i, envelope in enumerate(tdocs):
        label = envelope["label"]
        if i % 5 == 3:
            label = "SA9"  # outside the label set
        elif i % 5 == 4:
            label = "RAN1" if envelope["label"] != "RAN1" else "RAN2"
        tdoc_predictions.append({"item_id": envelope["item_id"], "label": label})
    write_jsonl(FIXTURES / "tdoc_predictions.jsonl", tdoc_predictions)


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    write_jsonl(FIXTURES / "corpus.jsonl", build_corpus())
    (FIXTURES / "lexicon.tsv").write_text(LEXICON_LINES, encoding="utf-8")
    (FIXTURES / "excluded_abbreviations.txt").write_text(EXCLUDED_ABBREVIATIONS, encoding="utf-8")

    # Stage the cleaned corpus to learn which documents feed MCQ generation.
    work_dir = REPO_ROOT / "out" / "fixture_staging"
    if work_dir.exists():
        shutil.rmtree(work_dir)
    config = _staging_config(work_dir)
    paths = PipelinePaths(work_dir)
    paths.out_dir.mkdir(parents=True, exist_ok=True)
    stage_ingest(config, paths)
    stage_filter(config, paths)
    stage_dedup(config, paths)

    texts = selected_mcq_texts(config, paths)
    assert len(texts) == 3, f"expected 3 MCQ source docs, got {len(texts)}"
    write_mock_llm(texts, FIXTURES / "mock_llm")

    # Empty placeholders so config validation passes on the full run.
    for name in ("mcq_responses.jsonl", "equation_predictions.jsonl", "tdoc_predictions.jsonl"):
        (FIXTURES / name).write_text("", encoding="utf-8")

    report = run_pipeline(config)
    write_response_fixtures(paths.items)

    (FIXTURES / "pipeline.yaml").write_text(PIPELINE_YAML, encoding="utf-8")

    # Final verification run against the finished fixtures.
    verify_dir = REPO_ROOT / "out" / "fixture_verify"
    if verify_dir.exists():
        shutil.rmtree(verify_dir)
    config = _staging_config(verify_dir)
    report = run_pipeline(config)
    for stage in report.stages:
        print(
            f"{stage.name:<8} in={stage.input_count:<4} out={stage.output_count:<4} "
            f"drops={stage.drops} ({stage.wall_time_s:.2f}s)"
        )
    items = list(iter_jsonl(PipelinePaths(verify_dir).items))
    kinds = {}
    for item in items:
        kinds[item["kind"]] = kinds.get(item["kind"], 0) + 1
    print(f"forged items by kind: {kinds}")


if __name__ == "__main__":
    main()
