"""
VC Capacity Toolkit
Streamlit Application Entry Point

Responsibilities:
- Configure the Streamlit application
- Define and route between pages via st.navigation
- Display the landing page

No:
- API logic
- Capacity formulas
- Simulation
"""

import streamlit as st

from utils.sidebar import render_sidebar


# --------------------------------------------------
# Landing Page Content
# --------------------------------------------------

def render_landing() -> None:

    st.set_page_config(
        page_title="VC Capacity Toolkit",
        page_icon="📶",
        layout="wide",
        initial_sidebar_state="expanded"
    )

    render_sidebar()

    st.markdown(
        """
        <style>

        .main-title{
            font-size:46px;
            font-weight:bold;
            text-align:center;
            color:#1565C0;
        }

        .subtitle{
            font-size:18px;
            text-align:center;
            color:#555555;
            margin-bottom:25px;
        }

        </style>
        """,
        unsafe_allow_html=True
    )

    st.markdown(
        "<div class='main-title'>📶 VC Capacity Toolkit</div>",
        unsafe_allow_html=True
    )

    st.markdown(
        """
        <div class='subtitle'>
        Ergodic capacity of user-centric virtual-cell mmWave networks,
        evaluated in closed form and checked by simulation.
        </div>
        """,
        unsafe_allow_html=True
    )

    st.divider()

    # ----------------------------------------
    # Overview
    # ----------------------------------------

    st.markdown("## Overview")

    st.write(
        """
A typical user is served jointly by its K nearest access points.
APs form a Poisson point process, links are blocked with
probability 1 - exp(-beta r), and antennas are sectored.

Capacity is computed two ways:

- Analytic: Laplace-transform expressions integrated numerically
  (Nakagami, Rayleigh, or no small-scale fading)
- Monte Carlo: full deployments simulated on a disk of radius R
"""
    )

    st.divider()

    st.markdown("## Application Pages")

    with st.container(border=True):

        st.markdown("**Capacity** – Analytic and simulated capacity at one point.")
        st.markdown("**Sweep** – Capacity over a lambda, beta or K grid.")
        st.markdown("**LOS Probability** – Chance that every serving link is LOS.")

    st.divider()

    st.caption(
        "VC Capacity Toolkit • tables and CSV exports, no built-in charts"
    )


# --------------------------------------------------
# Page Declarations + Navigation
# --------------------------------------------------

landing_page = st.Page(
    render_landing,
    title="Landing Page",
    icon="📶",
    default=True
)

capacity_page = st.Page(
    "pages/1_Capacity.py",
    title="Capacity",
    icon="📶"
)

sweep_page = st.Page(
    "pages/2_Sweep.py",
    title="Sweep",
    icon="📈"
)

los_page = st.Page(
    "pages/3_LOS_Probability.py",
    title="LOS Probability",
    icon="📡"
)

nav = st.navigation(
    [
        landing_page,
        capacity_page,
        sweep_page,
        los_page
    ]
)

nav.run()
